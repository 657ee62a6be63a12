#pragma once

// Reference implementations written independently of the library: plain
// nested loops over std::vector<std::vector<double>>, no shared helpers.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix gcn_normalize(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = 1.0;
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  }
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a[i][j] + (i == j ? 1.0 : 0.0);
      out[i][j] = aij / (std::sqrt(deg[i]) * std::sqrt(deg[j]));
    }
  }
  return out;
}

inline double rmse(const Matrix& pred, const Matrix& truth) {
  const std::size_t n = pred.size();
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pred[i][j] - truth[i][j];
      acc += d * d;
      ++count;
    }
  }
  return count == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(count));
}

inline double ew_kl(const Matrix& pred, const Matrix& truth, double tau) {
  const std::size_t n = pred.size();
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pred[i][j] > tau && truth[i][j] > tau) {
        sp += truth[i][j];
        sq += pred[i][j];
      }
    }
  }
  if (sp == 0.0) return 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pred[i][j] > tau && truth[i][j] > tau) {
        const double p = truth[i][j] / sp;
        const double q = pred[i][j] / sq;
        kl += p * std::log(p / q);
      }
    }
  }
  return kl;
}

// base: 0 union, 1 all pairs, 2 truth edges
inline double mismatch_rate(const Matrix& pred, const Matrix& truth, double tau, int base = 0) {
  const std::size_t n = pred.size();
  std::size_t mismatched = 0, either = 0, pairs = 0, true_edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool p = pred[i][j] > tau;
      const bool t = truth[i][j] > tau;
      ++pairs;
      if (p != t) ++mismatched;
      if (p || t) ++either;
      if (t) ++true_edges;
    }
  }
  const std::size_t denom = base == 0 ? either : base == 1 ? pairs : true_edges;
  return denom == 0 ? 0.0 : static_cast<double>(mismatched) / static_cast<double>(denom);
}

}  // namespace oracle
