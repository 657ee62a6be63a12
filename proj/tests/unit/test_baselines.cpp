#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "hqtlp/baselines.hpp"
#include "hqtlp/datagen.hpp"
#include "hqtlp/errors.hpp"
#include "hqtlp/metrics.hpp"

using namespace hqtlp;
using namespace hqtlp::baselines;
using testing_support::is_valid_adjacency;
using testing_support::kObjectiveRounding;
using testing_support::random_adjacency;
using testing_support::relative_rise;

namespace {

Tensor unit_offdiag(std::size_t n, double w) {
  Tensor a(n, n, w);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 0.0;
  return a;
}

double frobenius(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  return std::sqrt(s);
}

train::TrainConfig small_rnn_config() {
  train::TrainConfig c;
  c.window = 4;
  c.epochs_pretrain = 2;
  c.epochs_online = 1;
  c.lr_g = 1e-2;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Collapse, Examples) {
  std::mt19937_64 rng(1);
  const Tensor a = random_adjacency(5, rng);
  for (double beta : {0.1, 0.5, 0.9}) EXPECT_EQ(collapse(std::vector<Tensor>{a}, beta), a);

  const std::vector<Tensor> two{unit_offdiag(4, 2.0), unit_offdiag(4, 4.0)};
  const Tensor cn = collapse(two, 0.5);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(cn(i, j), i == j ? 0.0 : 10.0 / 3.0, 1e-15);

  const std::vector<Tensor> same(6, a);
  EXPECT_LT(max_abs_diff(collapse(same, 0.7), a), 1e-12);
}

TEST(CollapseConfig, RankAndValidation) {
  CollapseConfig c;
  EXPECT_EQ(c.rank_for(32), 16u);
  EXPECT_EQ(c.rank_for(10), 5u);
  EXPECT_EQ(c.rank_for(128), 16u);
  c.rank = 3;
  EXPECT_EQ(c.rank_for(128), 3u);
  EXPECT_NO_THROW(c.validate(5));
  c.rank = 6;
  EXPECT_THROW(c.validate(5), ConfigError);
  c = {};
  c.beta = 1.0;
  EXPECT_THROW(c.validate(5), ConfigError);
  c.beta = 0.0;
  EXPECT_THROW(c.validate(5), ConfigError);
}

TEST(CnSvd, FullRankReconstructsCollapse) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor cn = random_adjacency(9, rng, 0.5, 100.0);
    EXPECT_LT(max_abs_diff(truncated_svd(cn, 9), cn), 1e-8);
    EXPECT_LT(max_abs_diff(cn_svd_predict(cn, 9), cn), 1e-8);
  }
}

TEST(CnSvd, RankOneRecovery) {
  const std::vector<double> u{1.0, 2.0, 0.5, 3.0, 1.5};
  Tensor m(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) m(i, j) = u[i] * u[j];
  EXPECT_LT(max_abs_diff(truncated_svd(m, 1), m), 1e-8);
}

TEST(CnSvd, ValidOutputAndRankErrors) {
  std::mt19937_64 rng(3);
  const Tensor cn = random_adjacency(8, rng, 0.5, 100.0);
  for (std::size_t r = 1; r <= 8; ++r) EXPECT_TRUE(is_valid_adjacency(cn_svd_predict(cn, r)));
  EXPECT_THROW((void)cn_svd_predict(cn, 9), ContractError);
  EXPECT_THROW((void)cn_svd_predict(cn, 0), ContractError);
}

TEST(CnSvd, RepeatedCallsIdentical) {
  std::mt19937_64 rng(4);
  const Tensor cn = random_adjacency(10, rng, 0.5, 100.0);
  EXPECT_EQ(cn_svd_predict(cn, 4), cn_svd_predict(cn, 4));
}

TEST(Nmf, ObjectiveNonIncreasingAndFactorsNonnegative) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor v = random_adjacency(10, rng, 0.4, 1.0, 3.0);
    const NmfResult r = nmf(v, 4, 200, 100 + trial);
    ASSERT_EQ(r.objective.size(), 201u);
    for (std::size_t k = 1; k < r.objective.size(); ++k) EXPECT_LE(relative_rise(r.objective[k], r.objective[k - 1]), kObjectiveRounding) << k;
    for (double x : r.w.data()) EXPECT_GE(x, 0.0);
    for (double x : r.h.data()) EXPECT_GE(x, 0.0);
  }
}

TEST(Nmf, RankOneRecovery) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> a(8), b(8);
  for (auto& x : a) x = u(rng);
  for (auto& x : b) x = u(rng);
  Tensor v(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) v(i, j) = a[i] * b[j];
  const NmfResult r = nmf(v, 1, 500, 7);
  EXPECT_LT(frobenius(sub(matmul(r.w, r.h), v)) / frobenius(v), 1e-3);
}

TEST(Nmf, HandlesZeroRowsAndMatrix) {
  Tensor v(4, 4);
  v(0, 1) = v(1, 0) = 2.0;
  const NmfResult r = nmf(v, 2, 50, 1);
  EXPECT_TRUE(r.w.all_finite());
  EXPECT_TRUE(r.h.all_finite());
  EXPECT_TRUE(is_valid_adjacency(cn_nmf_predict(Tensor(4, 4), 2, 20)));
}

TEST(Nmf, Deterministic) {
  std::mt19937_64 rng(8);
  const Tensor cn = random_adjacency(9, rng, 0.5, 1.0);
  EXPECT_EQ(cn_nmf_predict(cn, 3, 100), cn_nmf_predict(cn, 3, 100));
}

TEST(DwNmf, WeightedObjectiveNonIncreasing) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Tensor> inputs;
    for (int l = 0; l < 5; ++l) inputs.push_back(random_adjacency(8, rng, 0.4, 1.0));
    const std::vector<double> w{0.0625, 0.125, 0.25, 0.5, 1.0};
    const NmfResult r = weighted_nmf(inputs, w, 3, 150, trial);
    for (std::size_t k = 1; k < r.objective.size(); ++k) EXPECT_LE(relative_rise(r.objective[k], r.objective[k - 1]), kObjectiveRounding) << k;
  }
}

TEST(DwNmf, IdenticalSnapshotsReduceToCnNmf) {
  std::mt19937_64 rng(10);
  const Tensor a = random_adjacency(8, rng, 0.5, 1.0);
  const Tensor single = cn_nmf_predict(a, 3, 200);
  EXPECT_EQ(dw_nmf_predict(std::vector<Tensor>{a}, 0.5, 3, 200), single);
  const std::vector<Tensor> same(4, a);
  // equal weights differ from the single-snapshot run only by rounding
  EXPECT_LT(max_abs_diff(dw_nmf_predict(same, 0.999999, 3, 200), single), 1e-9);
  EXPECT_LT(max_abs_diff(dw_nmf_predict(same, 0.5, 3, 200), single), 1e-9);
}

TEST(DwNmf, StationarySequenceBeatsZeroPredictor) {
  data::SynthConfig c;
  c.nodes = 12;
  c.steps = 8;
  c.drift = 0.0;
  c.burst_prob = 0.0;
  c.mean_reversion = 1.0;
  c.seed = 4;
  const auto net = data::gen_synthetic(c);
  std::vector<Tensor> inputs;
  for (std::size_t t = 0; t < 7; ++t) inputs.push_back(net[t].adj);
  const Tensor pred = dw_nmf_predict(inputs, 0.5, 6, 300);
  const Tensor& next = net[7].adj;
  EXPECT_LT(metrics::rmse(pred, next), metrics::rmse(Tensor(12, 12), next));
}

TEST(Factorization, PredictorsEmitValidAdjacencies) {
  data::SynthConfig c;
  c.nodes = 10;
  c.steps = 30;
  c.seed = 2;
  const train::SequenceData data(data::gen_synthetic(c), 20);
  train::TrainConfig tc;
  tc.window = 5;
  for (auto kind : {FactorizationKind::kCnSvd, FactorizationKind::kCnNmf, FactorizationKind::kDwNmf}) {
    FactorizationPredictor p(kind, CollapseConfig{}, 5);
    const auto records = train::predict_online(p, data, 20, tc);
    ASSERT_EQ(records.size(), 10u);
    for (const auto& r : records) EXPECT_TRUE(is_valid_adjacency(r.pred.adj));
    FactorizationPredictor q(kind, CollapseConfig{}, 5);
    const auto again = train::predict_online(q, data, 20, tc);
    for (std::size_t k = 0; k < records.size(); ++k) EXPECT_EQ(records[k].pred.adj, again[k].pred.adj);
  }
}

TEST(RnnBaselines, DeterministicValidAndCounted) {
  data::SynthConfig c;
  c.nodes = 6;
  c.steps = 20;
  c.seed = 5;
  const train::SequenceData data(data::gen_synthetic(c), 14);
  for (auto kind : {CellKind::kGru, CellKind::kLstm}) {
    const auto a = rnn_baseline_predict(data, 14, kind, 8, small_rnn_config());
    const auto b = rnn_baseline_predict(data, 14, kind, 8, small_rnn_config());
    ASSERT_EQ(a.size(), 6u);
    ASSERT_EQ(b.size(), 6u);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_EQ(a[k].pred.adj, b[k].pred.adj);
      EXPECT_TRUE(is_valid_adjacency(a[k].pred.adj));
    }
  }
  EXPECT_THROW((void)rnn_baseline_predict(data, 4, CellKind::kGru, 8, small_rnn_config()), ConfigError);
}

TEST(RnnBaselines, TrainingReducesLoss) {
  data::SynthConfig c;
  c.nodes = 6;
  c.steps = 20;
  c.seed = 6;
  const train::SequenceData data(data::gen_synthetic(c), 20);
  auto cfg = small_rnn_config();
  SequenceRegressor m(CellKind::kGru, 6, 8, cfg);
  const train::History h(data, 20);
  const double first = m.update(h, 10);
  double last = first;
  for (int k = 0; k < 50; ++k) last = m.update(h, 10);
  EXPECT_LT(last, first);
}
