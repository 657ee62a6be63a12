#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "hqtlp/tensor.hpp"
#include "oracles.hpp"

namespace testing_support {

inline hqtlp::Tensor random_tensor(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                   double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  hqtlp::Tensor t(rows, cols);
  for (double& x : t.data()) x = u(rng);
  return t;
}

// Symmetric, zero diagonal, nonnegative. Each pair is an edge with
// probability `density`; weights are log-uniform over `decades` below w_hi.
inline hqtlp::Tensor random_adjacency(std::size_t n, std::mt19937_64& rng, double density = 0.4,
                                      double w_hi = 10.0, double decades = 3.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  hqtlp::Tensor a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < density) {
        const double w = w_hi * std::pow(10.0, -decades * u(rng));
        a(i, j) = w;
        a(j, i) = w;
      }
    }
  }
  return a;
}

inline oracle::Matrix to_matrix(const hqtlp::Tensor& t) {
  oracle::Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m[i][j] = t(i, j);
  return m;
}

inline bool is_valid_adjacency(const hqtlp::Tensor& a, double hi = 1e300) {
  if (a.rank() != 2 || a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) return false;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i) || !(a(i, j) >= 0.0) || !(a(i, j) <= hi)) return false;
    }
  }
  return true;
}

// Relative amount by which an evaluated objective may exceed the previous
// one before it counts as an increase. Multiplicative updates are monotone in
// exact arithmetic; near convergence the evaluated objective jitters by a few ulps.
constexpr double kObjectiveRounding = 1e-14;

inline double relative_rise(double cur, double prev) { return (cur - prev) / std::max(std::abs(prev), 1e-300); }

}  // namespace testing_support
