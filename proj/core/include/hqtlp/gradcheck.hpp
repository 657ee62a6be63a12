#pragma once

#include <functional>
#include <span>

#include "hqtlp/autodiff.hpp"

namespace hqtlp {

// Builds a scalar loss on `tape` from the bound parameters. Must be
// deterministic: it is re-evaluated twice per perturbed entry.
using ScalarFunction = std::function<Var(Tape& tape, std::span<const Var> params)>;

/// Compares tape gradients against central finite differences.
///
/// Returns max over all parameter entries of
/// |analytic - numeric| / max(1, |numeric|), where
/// numeric = (f(x + h) - f(x - h)) / 2h.
/// If the two one-sided slopes at an entry differ by more than
/// 1e-4 * max(1, |numeric|), h is cut by 10 (down to h / 1000) so the
/// probe does not straddle a relu kink.
double grad_check(const ScalarFunction& f, std::span<const Tensor> params, double h = 1e-5);

}  // namespace hqtlp
