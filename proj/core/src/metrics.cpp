#include "hqtlp/metrics.hpp"

#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp::metrics {

namespace {

void require_square_pair(const Tensor& pred, const Tensor& truth) {
  if (!pred.same_shape(truth) || pred.rank() != 2 || pred.rows() != pred.cols()) {
    throw ContractError("metrics: prediction " + pred.shape_str() + " and truth " +
                     truth.shape_str() + " must be equal square matrices");
  }
}

struct EdgeCounts {
  std::size_t matched = 0;
  std::size_t mismatched = 0;
  std::size_t truth = 0;
  std::size_t pred = 0;
  std::size_t pairs = 0;
};

EdgeCounts count_edges(const Tensor& pred, const Tensor& truth, double tau_abs) {
  EdgeCounts c;
  const std::size_t n = pred.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool p = pred(i, j) > tau_abs;
      const bool t = truth(i, j) > tau_abs;
      c.pred += p;
      c.truth += t;
      c.matched += p && t;
      c.mismatched += p != t;
      ++c.pairs;
    }
  }
  return c;
}

double rate(const EdgeCounts& c, MismatchBase base) {
  std::size_t denom = 0;
  switch (base) {
    case MismatchBase::kUnion: denom = c.matched + c.mismatched; break;
    case MismatchBase::kAllPairs: denom = c.pairs; break;
    case MismatchBase::kTruthEdges: denom = c.truth; break;
  }
  return denom == 0 ? 0.0 : static_cast<double>(c.mismatched) / static_cast<double>(denom);
}

}  // namespace

MismatchBase parse_mismatch_base(std::string_view name) {
  if (name == "union") return MismatchBase::kUnion;
  if (name == "all-pairs") return MismatchBase::kAllPairs;
  if (name == "truth-edges") return MismatchBase::kTruthEdges;
  throw ConfigError("unknown mismatch base '" + std::string(name) +
                    "' (expected union, all-pairs or truth-edges)");
}

std::string_view to_string(MismatchBase base) {
  switch (base) {
    case MismatchBase::kUnion: return "union";
    case MismatchBase::kAllPairs: return "all-pairs";
    case MismatchBase::kTruthEdges: return "truth-edges";
  }
  return "union";
}

double rmse(const Tensor& pred, const Tensor& truth) {
  require_square_pair(pred, truth);
  const std::size_t n = pred.rows();
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pred(i, j) - truth(i, j);
      acc += d * d;
    }
  }
  return std::sqrt(acc / static_cast<double>(n * (n - 1) / 2));
}

double ew_kl(const Tensor& pred, const Tensor& truth, double tau_abs) {
  require_square_pair(pred, truth);
  const std::size_t n = pred.rows();
  double sum_p = 0.0;
  double sum_q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pred(i, j) > tau_abs && truth(i, j) > tau_abs) {
        sum_p += truth(i, j);
        sum_q += pred(i, j);
      }
    }
  }
  if (sum_p == 0.0) return 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pred(i, j) > tau_abs && truth(i, j) > tau_abs) {
        const double p = truth(i, j) / sum_p;
        const double q = pred(i, j) / sum_q;
        kl += p * std::log(p / q);
      }
    }
  }
  // Rounding can leave a tiny negative value for identical distributions.
  return kl < 0.0 ? 0.0 : kl;
}

double mismatch_rate(const Tensor& pred, const Tensor& truth, double tau_abs, MismatchBase base) {
  require_square_pair(pred, truth);
  return rate(count_edges(pred, truth, tau_abs), base);
}

MetricReport evaluate(const Tensor& pred, const Tensor& truth, double tau_abs, MismatchBase base) {
  require_square_pair(pred, truth);
  const EdgeCounts c = count_edges(pred, truth, tau_abs);
  MetricReport r;
  r.rmse = rmse(pred, truth);
  r.ew_kl = ew_kl(pred, truth, tau_abs);
  r.mr = rate(c, base);
  r.matched_edges = c.matched;
  r.mismatched_edges = c.mismatched;
  r.true_edges = c.truth;
  r.pred_edges = c.pred;
  return r;
}

Averages aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw ContractError("aggregate: no records");
  Averages a;
  for (const MetricReport& r : reports) {
    a.armse += r.rmse;
    a.aew_kl += r.ew_kl;
    a.amr += r.mr;
  }
  const double k = static_cast<double>(reports.size());
  a.armse /= k;
  a.aew_kl /= k;
  a.amr /= k;
  return a;
}

}  // namespace hqtlp::metrics
