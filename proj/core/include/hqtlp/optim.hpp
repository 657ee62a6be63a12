#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hqtlp/tensor.hpp"

namespace hqtlp {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment estimates, allocated on the first step.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update applied in place to `params`.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const AdamConfig& config);

}  // namespace hqtlp
