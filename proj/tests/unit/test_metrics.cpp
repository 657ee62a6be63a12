#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "hqtlp/errors.hpp"
#include "hqtlp/metrics.hpp"

using namespace hqtlp;
using namespace hqtlp::metrics;
using testing_support::random_adjacency;
using testing_support::to_matrix;

namespace {

Tensor edges(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> pairs, double w = 1.0) {
  Tensor a(n, n);
  for (auto [i, j] : pairs) a(i, j) = a(j, i) = w;
  return a;
}

Tensor permuted(const Tensor& a, const std::vector<std::size_t>& p) {
  Tensor out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(p[i], p[j]);
  return out;
}

}  // namespace

TEST(Rmse, Examples) {
  std::mt19937_64 rng(1);
  const Tensor a = random_adjacency(6, rng);
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmse(edges(2, {{0, 1}}, 3.0), edges(2, {{0, 1}}, 1.0)), 2.0);
  EXPECT_THROW((void)rmse(Tensor(2, 2), Tensor(3, 3)), ContractError);
}

TEST(Rmse, PermutationInvariant) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor p = random_adjacency(8, rng, 0.5, 100.0);
    const Tensor t = random_adjacency(8, rng, 0.5, 100.0);
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_NEAR(rmse(permuted(p, perm), permuted(t, perm)), rmse(p, t), 1e-12);
  }
}

TEST(EwKl, Examples) {
  const Tensor truth = edges(3, {{0, 1}, {1, 2}});
  Tensor pred = truth;
  pred(1, 2) = pred(2, 1) = 3.0;
  EXPECT_NEAR(ew_kl(pred, truth, 0.0), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(ew_kl(pred, truth, 0.0), 0.1438, 1e-4);
  EXPECT_NEAR(ew_kl(scale(truth, 7.0), truth, 0.0), 0.0, 1e-15);
  EXPECT_EQ(ew_kl(Tensor(3, 3), truth, 0.0), 0.0);
}

TEST(EwKl, NonnegativeAndScaleInvariant) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor p = random_adjacency(9, rng, 0.6, 1000.0, 4.0);
    const Tensor t = random_adjacency(9, rng, 0.6, 1000.0, 4.0);
    const double kl = ew_kl(p, t, 0.5);
    EXPECT_GE(kl, 0.0);
    EXPECT_NEAR(ew_kl(scale(p, 3.5), scale(t, 3.5), 0.5 * 3.5), kl, 1e-12);
  }
}

TEST(MismatchRate, Examples) {
  const Tensor truth = edges(4, {{0, 1}, {1, 2}});
  const Tensor pred = edges(4, {{1, 2}, {2, 3}});
  EXPECT_DOUBLE_EQ(mismatch_rate(pred, truth, 0.0), 2.0 / 3.0);
  EXPECT_EQ(mismatch_rate(truth, truth, 0.0), 0.0);
  EXPECT_EQ(mismatch_rate(Tensor(4, 4), truth, 0.0), 1.0);
  EXPECT_EQ(mismatch_rate(Tensor(4, 4), Tensor(4, 4), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(mismatch_rate(pred, truth, 0.0, MismatchBase::kAllPairs), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(mismatch_rate(pred, truth, 0.0, MismatchBase::kTruthEdges), 1.0);
}

TEST(MismatchRate, ThresholdIsStrict) {
  const Tensor truth = edges(2, {{0, 1}}, 0.5);
  EXPECT_EQ(mismatch_rate(truth, Tensor(2, 2), 0.5), 0.0);
  EXPECT_EQ(mismatch_rate(truth, Tensor(2, 2), 0.49), 1.0);
}

TEST(MismatchRate, InvariantToThresholdPreservingReweighting) {
  std::mt19937_64 rng(4);
  const double tau = 0.3;
  for (int trial = 0; trial < 30; ++trial) {
    const Tensor p = random_adjacency(9, rng, 0.5, 10.0, 3.0);
    const Tensor t = random_adjacency(9, rng, 0.5, 10.0, 3.0);
    // strictly increasing, maps (tau, ∞) into itself and [0, tau] into itself
    auto f = [tau](const Tensor& a) {
      Tensor out = a;
      for (double& x : out.data())
        if (x > tau) x = tau + std::sqrt(x - tau) * 5.0;
        else x = x * 0.5;
      return out;
    };
    EXPECT_EQ(mismatch_rate(f(p), f(t), tau), mismatch_rate(p, t, tau));
  }
}

TEST(Metrics, MatchBruteForceOracles) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor p = random_adjacency(10, rng, 0.5, 1000.0, 4.0);
    const Tensor t = random_adjacency(10, rng, 0.5, 1000.0, 4.0);
    const double tau = trial % 2 == 0 ? 0.0 : 1.0;
    EXPECT_NEAR(rmse(p, t), oracle::rmse(to_matrix(p), to_matrix(t)), 1e-12);
    EXPECT_NEAR(ew_kl(p, t, tau), oracle::ew_kl(to_matrix(p), to_matrix(t), tau), 1e-12);
    for (int base = 0; base < 3; ++base) {
      EXPECT_NEAR(mismatch_rate(p, t, tau, static_cast<MismatchBase>(base)),
                  oracle::mismatch_rate(to_matrix(p), to_matrix(t), tau, base), 1e-12);
    }
  }
}

TEST(Evaluate, CountsAreConsistent) {
  const Tensor truth = edges(4, {{0, 1}, {1, 2}});
  const Tensor pred = edges(4, {{1, 2}, {2, 3}});
  const MetricReport r = evaluate(pred, truth, 0.0);
  EXPECT_EQ(r.matched_edges, 1u);
  EXPECT_EQ(r.mismatched_edges, 2u);
  EXPECT_EQ(r.true_edges, 2u);
  EXPECT_EQ(r.pred_edges, 2u);
  EXPECT_DOUBLE_EQ(r.mr, 2.0 / 3.0);
  EXPECT_EQ(r.rmse, rmse(pred, truth));
}

TEST(Aggregate, Means) {
  std::vector<MetricReport> rs(1);
  rs[0].rmse = 1.5;
  rs[0].ew_kl = 0.2;
  rs[0].mr = 0.4;
  Averages a = aggregate(rs);
  EXPECT_EQ(a.armse, 1.5);
  EXPECT_EQ(a.aew_kl, 0.2);
  EXPECT_EQ(a.amr, 0.4);
  rs.push_back({});
  rs[0].rmse = 1.0;
  rs[1].rmse = 3.0;
  EXPECT_EQ(aggregate(rs).armse, 2.0);
  EXPECT_THROW((void)aggregate(std::vector<MetricReport>{}), ContractError);
}

TEST(Aggregate, BoundedByExtremes) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<MetricReport> rs(17);
  for (auto& r : rs) r.rmse = u(rng);
  const double m = aggregate(rs).armse;
  const auto [lo, hi] = std::minmax_element(rs.begin(), rs.end(), [](auto& a, auto& b) { return a.rmse < b.rmse; });
  EXPECT_GE(m, lo->rmse);
  EXPECT_LE(m, hi->rmse);
}

TEST(MismatchBaseNames, ParseAndPrint) {
  for (auto b : {MismatchBase::kUnion, MismatchBase::kAllPairs, MismatchBase::kTruthEdges})
    EXPECT_EQ(parse_mismatch_base(to_string(b)), b);
  EXPECT_THROW((void)parse_mismatch_base("bogus"), ConfigError);
}
