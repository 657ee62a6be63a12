#include "hqtlp/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hqtlp {

namespace {

double evaluate(const ScalarFunction& f, std::span<const Tensor> params) {
  Tape tape;
  std::vector<Var> bound;
  bound.reserve(params.size());
  for (const Tensor& p : params) bound.push_back(tape.constant(p));
  return f(tape, bound).value().item();
}

constexpr double kKinkSlopeGap = 1e-4;
constexpr double kMinStepRatio = 1e-3;

}  // namespace

double grad_check(const ScalarFunction& f, std::span<const Tensor> params, double h) {
  GradientMap analytic;
  {
    Tape tape;
    std::vector<Var> bound;
    bound.reserve(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) bound.push_back(tape.param(params[k], k));
    analytic = tape.backward(f(tape, bound));
  }

  std::vector<Tensor> work(params.begin(), params.end());
  const double f0 = evaluate(f, work);
  double worst = 0.0;
  for (std::size_t p = 0; p < work.size(); ++p) {
    const Tensor& grad = analytic.at(p);
    for (std::size_t e = 0; e < work[p].size(); ++e) {
      const double saved = work[p][e];
      double numeric = 0.0;
      // one-sided slopes that disagree mean a kink (relu) lies inside the
      // probe interval; retry with a smaller step
      for (double step = h; step >= h * kMinStepRatio; step *= 0.1) {
        work[p][e] = saved + step;
        const double up = evaluate(f, work);
        work[p][e] = saved - step;
        const double down = evaluate(f, work);
        work[p][e] = saved;
        numeric = (up - down) / (2.0 * step);
        const double asym = std::abs((up - f0) - (f0 - down)) / step;
        if (asym <= kKinkSlopeGap * std::max(1.0, std::abs(numeric))) break;
      }
      const double err = std::abs(grad[e] - numeric) / std::max(1.0, std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace hqtlp
