#include "hqtlp/optim.hpp"

#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp {

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) {
    throw ContractError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                        std::to_string(grads.size()) + " gradients");
  }
  if (state.step == 0 && state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->shape(), 0.0);
      state.v.emplace_back(p->shape(), 0.0);
    }
  }
  if (state.m.size() != params.size()) throw ContractError("adam_step: optimizer state size mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k]->same_shape(grads[k]) || !params[k]->same_shape(state.m[k])) {
      throw ContractError("adam_step: shape mismatch for parameter " + std::to_string(k) + ": " +
                          params[k]->shape_str() + " vs gradient " + grads[k].shape_str());
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->data();
    auto g = grads[k].data();
    auto m = state.m[k].data();
    auto v = state.v[k].data();
    for (std::size_t e = 0; e < p.size(); ++e) {
      m[e] = config.beta1 * m[e] + (1.0 - config.beta1) * g[e];
      v[e] = config.beta2 * v[e] + (1.0 - config.beta2) * g[e] * g[e];
      const double m_hat = m[e] / c1;
      const double v_hat = v[e] / c2;
      p[e] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

}  // namespace hqtlp
