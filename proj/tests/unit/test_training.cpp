#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "loss_fixtures.hpp"
#include "hqtlp/datagen.hpp"
#include "hqtlp/errors.hpp"
#include "hqtlp/training.hpp"

using namespace hqtlp;
using namespace hqtlp::train;

namespace {

model::ModelDims tiny_dims(std::size_t n) {
  model::ModelDims d;
  d.nodes = n;
  d.noise_dim = 3;
  d.gcn1_dim = 6;
  d.gcn2_dim = 3;
  d.hidden_dim = 8;
  d.disc_hidden1 = 10;
  d.disc_hidden2 = 5;
  return d;
}

graph::DynamicNetwork tiny_network(std::size_t n, std::size_t steps, std::uint64_t seed) {
  data::SynthConfig c;
  c.nodes = n;
  c.steps = steps;
  c.sparsity = 0.3;
  c.seed = seed;
  return data::gen_synthetic(c);
}

TrainConfig tiny_config(std::size_t window) {
  TrainConfig c;
  c.window = window;
  c.epochs_pretrain = 2;
  c.epochs_online = 1;
  c.lr_g = 1e-2;
  c.lr_d = 1e-2;
  c.seed = 17;
  return c;
}

}  // namespace

TEST(Losses, GeneratorExamples) {
  const Tensor a = Tensor::from_rows({{0, 0.3}, {0.3, 0}});
  TrainConfig c;
  c.lambda_adv = 0.0;
  EXPECT_EQ(loss_g(a, a, 0.5, c), 0.0);
  c.lambda_rec = 0.0;
  c.lambda_adv = 0.7;
  EXPECT_NEAR(loss_g(a, a, 0.5, c), 0.7 * std::log(2.0), 1e-15);
  c.lambda_rec = 1.0;
  const Tensor b = Tensor::from_rows({{0, 0.1}, {0.1, 0}});
  double prev = loss_g(b, a, 0.01, c);
  for (double d = 0.02; d < 1.0; d += 0.01) {
    const double cur = loss_g(b, a, d, c);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

TEST(Losses, DiscriminatorExamples) {
  EXPECT_NEAR(loss_d(0.5, 0.5), 2.0 * std::log(2.0), 1e-15);
  EXPECT_NEAR(loss_d(0.5, 0.5), 1.3863, 1e-4);
  EXPECT_LT(loss_d(1.0 - 1e-12, 1e-12), 1e-11);
  for (double r : {0.1, 0.35, 0.8})
    for (double f : {0.05, 0.5, 0.9}) EXPECT_NEAR(loss_d(r, f), loss_d(1.0 - f, 1.0 - r), 1e-12);
}

TEST(Losses, FullLossesPassGradientCheck) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto inst = testing_support::make_loss_instance(seed);
    EXPECT_LT(testing_support::check_generator_loss(inst), 1e-4) << "seed " << seed;
    EXPECT_LT(testing_support::check_discriminator_loss(inst), 1e-4) << "seed " << seed;
  }
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lambda_rec = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lambda_adv = -1e-3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.window = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(History, RefusesUnobservedSteps) {
  const SequenceData data(tiny_network(5, 12, 1), 12);
  const History h(data, 7);
  EXPECT_NO_THROW((void)h.scaled(6));
  EXPECT_THROW((void)h.scaled(7), ContractError);
  EXPECT_THROW((void)h.a_hat(11), ContractError);
  EXPECT_THROW((void)h.upper(7), ContractError);
  EXPECT_THROW(History(data, 13), ContractError);
}

TEST(TrainAdversarial, ZeroEpochsReturnsParamsUnchanged) {
  const auto dims = tiny_dims(5);
  const SequenceData data(tiny_network(5, 12, 2), 12);
  Rng rng(3);
  const auto g = model::GeneratorParams::init(dims, rng);
  const auto d = model::DiscriminatorParams::init(dims, rng);
  const auto targets = targets_before(12, 4);
  const auto out = train_adversarial(History(data, 12), targets, g, d, tiny_config(4), 0);
  EXPECT_TRUE(out.generator == g);
  EXPECT_TRUE(out.discriminator == d);
}

TEST(TrainAdversarial, EmptyTargetListIsConfigError) {
  const auto dims = tiny_dims(5);
  const SequenceData data(tiny_network(5, 12, 2), 12);
  Rng rng(3);
  EXPECT_THROW((void)train_adversarial(History(data, 12), {}, model::GeneratorParams::init(dims, rng),
                                       model::DiscriminatorParams::init(dims, rng), tiny_config(4), 1),
               ConfigError);
}

TEST(TrainAdversarial, SameSeedTwiceIsIdentical) {
  const auto dims = tiny_dims(5);
  const SequenceData data(tiny_network(5, 14, 4), 14);
  auto run = [&] {
    Rng rng(5);
    const auto g = model::GeneratorParams::init(dims, rng);
    const auto d = model::DiscriminatorParams::init(dims, rng);
    return train_adversarial(History(data, 14), targets_before(14, 4), g, d, tiny_config(4), 3);
  };
  const auto a = run();
  const auto b = run();
  EXPECT_TRUE(a.generator == b.generator);
  EXPECT_TRUE(a.discriminator == b.discriminator);
  Rng rng(5);
  EXPECT_FALSE(a.generator == model::GeneratorParams::init(dims, rng));
}

TEST(TrainAdversarial, ZeroAdversarialWeightMatchesReconstructionTrainer) {
  const auto dims = tiny_dims(5);
  const SequenceData data(tiny_network(5, 14, 6), 14);
  Rng rng(7);
  const auto g0 = model::GeneratorParams::init(dims, rng);
  const auto d0 = model::DiscriminatorParams::init(dims, rng);
  TrainConfig c = tiny_config(4);
  c.lambda_adv = 0.0;
  const auto targets = targets_before(14, 4);

  std::vector<double> loss_a, loss_b;
  std::vector<model::GeneratorParams> traj_a, traj_b;
  const auto adv = train_adversarial(History(data, 14), targets, g0, d0, c, 3, [&](const TrainEvent& e) {
    loss_a.push_back(e.loss_g);
    traj_a.push_back(*e.generator);
  });
  const auto rec = train_reconstruction(History(data, 14), targets, g0, c, 3, [&](const TrainEvent& e) {
    loss_b.push_back(e.loss_g);
    traj_b.push_back(*e.generator);
  });
  ASSERT_EQ(traj_a.size(), 3 * targets.size());
  ASSERT_EQ(traj_a.size(), traj_b.size());
  EXPECT_EQ(loss_a, loss_b);
  for (std::size_t k = 0; k < traj_a.size(); ++k) EXPECT_TRUE(traj_a[k] == traj_b[k]) << "update " << k;
  EXPECT_TRUE(adv.generator == rec);
  // D still trained
  EXPECT_FALSE(adv.discriminator == d0);
}

TEST(TargetsBefore, WindowTargets) {
  EXPECT_EQ(targets_before(14, 4), (std::vector<std::size_t>{4, 5, 6, 7, 8, 9, 10, 11, 12, 13}));
  EXPECT_TRUE(targets_before(4, 4).empty());
}

TEST(PredictOnline, FiftyRecordsForSixtyStepsWithWindowTen) {
  const std::size_t n = 5;
  const SequenceData data(tiny_network(n, 60, 8), 10);
  TrainConfig c = tiny_config(10);
  c.epochs_online = 0;
  HqtlpModel m(tiny_dims(n), c);
  const auto records = predict_online(m, data, 60 - 50, c);
  ASSERT_EQ(records.size(), 50u);
  for (std::size_t k = 0; k < records.size(); ++k) {
    EXPECT_EQ(records[k].t, 10 + k);
    EXPECT_EQ(records[k].pred.t, records[k].t);
    EXPECT_EQ(records[k].truth.t, records[k].t);
    EXPECT_EQ(records[k].truth.adj, data.original()[records[k].t].adj);
    EXPECT_TRUE(testing_support::is_valid_adjacency(records[k].pred.adj));
  }
}

TEST(PredictOnline, RecordCountIsStepsMinusSplit) {
  const std::size_t n = 5;
  const SequenceData data(tiny_network(n, 20, 9), 12);
  TrainConfig c = tiny_config(4);
  for (std::size_t split : {4u, 5u, 12u, 19u}) {
    HqtlpModel m(tiny_dims(n), c);
    EXPECT_EQ(predict_online(m, data, split, c).size(), 20 - split);
  }
  HqtlpModel m(tiny_dims(n), c);
  EXPECT_THROW((void)predict_online(m, data, 3, c), ConfigError);
}

TEST(RunProtocol, DeterministicUnderFixedSeed) {
  const std::size_t n = 5;
  const SequenceData data(tiny_network(n, 20, 10), 14);
  auto run = [&] {
    TrainConfig c = tiny_config(4);
    HqtlpModel m(tiny_dims(n), c);
    return run_protocol(m, data, c);
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.size(), 6u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].pred.adj, b[k].pred.adj);
    EXPECT_EQ(a[k].metrics.rmse, b[k].metrics.rmse);
    EXPECT_EQ(a[k].metrics.ew_kl, b[k].metrics.ew_kl);
    EXPECT_EQ(a[k].metrics.mr, b[k].metrics.mr);
  }
}

TEST(RunProtocol, RetrainFromScratchAndAllWindowsRun) {
  const std::size_t n = 5;
  const SequenceData data(tiny_network(n, 16, 11), 12);
  TrainConfig c = tiny_config(4);
  c.retrain_from_scratch = true;
  HqtlpModel a(tiny_dims(n), c);
  EXPECT_EQ(run_protocol(a, data, c).size(), 4u);
  c.retrain_from_scratch = false;
  c.online_all_windows = true;
  c.noise_draws = 3;
  HqtlpModel b(tiny_dims(n), c);
  EXPECT_EQ(run_protocol(b, data, c).size(), 4u);
}
