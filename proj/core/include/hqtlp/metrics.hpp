#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "hqtlp/tensor.hpp"

namespace hqtlp::metrics {

// Denominator of the mismatch rate.
enum class MismatchBase {
  kUnion,       // pairs with an edge in either matrix (default)
  kAllPairs,    // all n(n-1)/2 pairs
  kTruthEdges,  // pairs with an edge in the ground truth
};

MismatchBase parse_mismatch_base(std::string_view name);
std::string_view to_string(MismatchBase base);

struct MetricReport {
  double rmse = 0.0;
  double ew_kl = 0.0;
  double mr = 0.0;
  std::size_t matched_edges = 0;     // edge in both
  std::size_t mismatched_edges = 0;  // edge in exactly one
  std::size_t true_edges = 0;
  std::size_t pred_edges = 0;
};

// All metrics read the unordered off-diagonal pairs i < j only. A pair holds
// an edge when its weight is strictly greater than tau_abs.

double rmse(const Tensor& pred, const Tensor& truth);

/// KL(truth ‖ pred) over pairs where both matrices have an edge, after
/// normalizing each side to sum to 1 over those pairs. Natural log; 0 when no
/// pair matches.
double ew_kl(const Tensor& pred, const Tensor& truth, double tau_abs);

double mismatch_rate(const Tensor& pred, const Tensor& truth, double tau_abs,
                     MismatchBase base = MismatchBase::kUnion);

MetricReport evaluate(const Tensor& pred, const Tensor& truth, double tau_abs,
                      MismatchBase base = MismatchBase::kUnion);

struct Averages {
  double armse = 0.0;
  double aew_kl = 0.0;
  double amr = 0.0;
};

// Arithmetic means; throws ContractError on an empty input.
Averages aggregate(std::span<const MetricReport> reports);

}  // namespace hqtlp::metrics
