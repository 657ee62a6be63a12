#pragma once

// Full generator and discriminator losses written as ScalarFunctions over
// the flat parameter list, for finite-difference checks.

#include <cstdint>
#include <span>
#include <vector>

#include "helpers.hpp"
#include "hqtlp/autodiff.hpp"
#include "hqtlp/dyngraph.hpp"
#include "hqtlp/gradcheck.hpp"
#include "hqtlp/model.hpp"
#include "hqtlp/random.hpp"

namespace testing_support {

struct LossInstance {
  hqtlp::model::ModelDims dims;
  std::vector<hqtlp::Tensor> a_hats;
  std::vector<hqtlp::Tensor> noise;
  hqtlp::Tensor truth_upper;
  hqtlp::Tensor fake_upper;
  std::vector<hqtlp::Tensor> g_params;
  std::vector<hqtlp::Tensor> d_params;
  double lambda_rec = 1.0;
  double lambda_adv = 0.5;
};

// n=6, L=3, d_z=4, d_1=8, d_2=4, d_h=8
inline LossInstance make_loss_instance(std::uint64_t seed) {
  LossInstance inst;
  auto& d = inst.dims;
  d.nodes = 6;
  d.noise_dim = 4;
  d.gcn1_dim = 8;
  d.gcn2_dim = 4;
  d.hidden_dim = 8;
  d.disc_hidden1 = 8;
  d.disc_hidden2 = 4;
  hqtlp::Rng rng(seed);
  for (int t = 0; t < 3; ++t) inst.a_hats.push_back(hqtlp::graph::gcn_normalize(random_adjacency(6, rng, 0.5, 1.0)));
  inst.noise = hqtlp::model::draw_noise(rng, 3, d);
  inst.truth_upper = hqtlp::graph::upper_triangle(random_adjacency(6, rng, 0.5, 1.0));
  std::uniform_real_distribution<double> u(0.05, 0.95);
  inst.fake_upper = hqtlp::Tensor(1, d.pairs());
  for (double& x : inst.fake_upper.data()) x = u(rng);
  const auto g = hqtlp::model::GeneratorParams::init(d, rng);
  const auto disc = hqtlp::model::DiscriminatorParams::init(d, rng);
  for (const hqtlp::Tensor* t : g.tensors()) inst.g_params.push_back(*t);
  for (const hqtlp::Tensor* t : disc.tensors()) inst.d_params.push_back(*t);
  // nonzero biases so their gradients are exercised away from 0
  std::uniform_real_distribution<double> b(-0.2, 0.2);
  for (auto* list : {&inst.g_params, &inst.d_params})
    for (hqtlp::Tensor& t : *list)
      if (t.rows() == 1)
        for (double& x : t.data()) x = b(rng);
  return inst;
}

inline hqtlp::model::GeneratorVars generator_vars(std::span<const hqtlp::Var> v) {
  hqtlp::model::GeneratorVars g;
  g.gcn1 = v[0];
  g.gcn2 = v[1];
  g.gru = hqtlp::model::GruVars::from(v.subspan(2, 9));
  g.fc_w = v[11];
  g.fc_b = v[12];
  return g;
}

inline hqtlp::model::DiscriminatorVars discriminator_vars(std::span<const hqtlp::Var> v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

// λ_rec·MSE + λ_adv·(−log D(G)), over generator and discriminator parameters.
inline double check_generator_loss(const LossInstance& inst) {
  std::vector<hqtlp::Tensor> params = inst.g_params;
  params.insert(params.end(), inst.d_params.begin(), inst.d_params.end());
  const std::size_t ng = inst.g_params.size();
  return hqtlp::grad_check(
      [&](hqtlp::Tape& tape, std::span<const hqtlp::Var> v) {
        const auto g = generator_vars(v.subspan(0, ng));
        const auto d = discriminator_vars(v.subspan(ng));
        const hqtlp::Var pred = hqtlp::model::generator_forward(tape, g, inst.a_hats, inst.noise);
        const hqtlp::Var rec = hqtlp::mse(pred, tape.constant(inst.truth_upper));
        const hqtlp::Var fool = hqtlp::softplus(hqtlp::scale(hqtlp::model::discriminator_logit(d, pred), -1.0));
        return hqtlp::add(hqtlp::scale(rec, inst.lambda_rec), hqtlp::scale(fool, inst.lambda_adv));
      },
      params);
}

// −log D(real) − log(1 − D(fake)) over discriminator parameters.
inline double check_discriminator_loss(const LossInstance& inst) {
  return hqtlp::grad_check(
      [&](hqtlp::Tape& tape, std::span<const hqtlp::Var> v) {
        const auto d = discriminator_vars(v);
        const hqtlp::Var real = hqtlp::model::discriminator_logit(d, tape.constant(inst.truth_upper));
        const hqtlp::Var fake = hqtlp::model::discriminator_logit(d, tape.constant(inst.fake_upper));
        return hqtlp::add(hqtlp::softplus(hqtlp::scale(real, -1.0)), hqtlp::softplus(fake));
      },
      inst.d_params);
}

}  // namespace testing_support
