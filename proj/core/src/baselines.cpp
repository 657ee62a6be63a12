#include "hqtlp/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp::baselines {

namespace {

constexpr double kFloor = 1e-12;

Eigen::MatrixXd to_eigen(const Tensor& t) {
  Eigen::MatrixXd m(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m(i, j) = t(i, j);
  return m;
}

double frobenius_sq_diff(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

void random_factors(std::size_t rows, std::size_t cols, std::size_t rank, double mean,
                    std::uint64_t seed, Tensor& w, Tensor& h) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // E[(WH)_ij] = rank * s^2 / 4 = mean
  const double s = std::sqrt(std::max(mean, kFloor) * 4.0 / static_cast<double>(rank));
  w = Tensor(rows, rank);
  h = Tensor(rank, cols);
  for (double& x : w.data()) x = s * u(rng);
  for (double& x : h.data()) x = s * u(rng);
}

// x ← x ∘ num / max(den, floor)
void multiplicative(Tensor& x, const Tensor& num, const Tensor& den) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] *= num[k] / std::max(den[k], kFloor);
}

std::vector<double> decay_weights(std::size_t length, double beta) {
  std::vector<double> w(length);
  for (std::size_t l = 0; l < length; ++l) {
    w[l] = std::pow(beta, static_cast<double>(length - 1 - l));
  }
  return w;
}

}  // namespace

std::size_t CollapseConfig::rank_for(std::size_t n) const {
  if (rank != 0) return rank;
  return std::max<std::size_t>(1, std::min<std::size_t>(16, n / 2));
}

void CollapseConfig::validate(std::size_t n) const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("collapse beta must lie in (0, 1)");
  const std::size_t r = rank_for(n);
  if (r < 1 || r > n) throw ConfigError("factorization rank must lie in [1, n]");
}

Tensor collapse(std::span<const Tensor> inputs, double beta) {
  if (inputs.empty()) throw ContractError("collapse: no snapshots");
  const auto w = decay_weights(inputs.size(), beta);
  double total = 0.0;
  for (double x : w) total += x;
  Tensor out(inputs[0].shape(), 0.0);
  for (std::size_t l = 0; l < inputs.size(); ++l) axpy(w[l] / total, inputs[l], out);
  return out;
}

Tensor truncated_svd(const Tensor& m, std::size_t rank) {
  const std::size_t n = std::min(m.rows(), m.cols());
  if (rank == 0 || rank > n) {
    throw ContractError("truncated_svd: rank " + std::to_string(rank) + " outside [1, " +
                        std::to_string(n) + "]");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd u = svd.matrixU();
  Eigen::MatrixXd v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();
  Tensor out(m.rows(), m.cols());
  for (std::size_t k = 0; k < rank; ++k) {
    Eigen::Index arg = 0;
    u.col(k).cwiseAbs().maxCoeff(&arg);
    if (u(arg, k) < 0.0) {
      u.col(k) *= -1.0;
      v.col(k) *= -1.0;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double ui = s(k) * u(i, k);
      for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += ui * v(j, k);
    }
  }
  return out;
}

Tensor cn_svd_predict(const Tensor& cn, std::size_t rank) {
  return graph::symmetrize_and_clean(truncated_svd(cn, rank));
}

NmfResult nmf(const Tensor& v, std::size_t rank, std::size_t iters, std::uint64_t seed) {
  const Tensor inputs[] = {v};
  const double weights[] = {1.0};
  return weighted_nmf(inputs, weights, rank, iters, seed);
}

NmfResult weighted_nmf(std::span<const Tensor> inputs, std::span<const double> weights,
                       std::size_t rank, std::size_t iters, std::uint64_t seed) {
  if (inputs.empty() || inputs.size() != weights.size()) {
    throw ContractError("weighted_nmf: need one weight per input matrix");
  }
  const std::size_t rows = inputs[0].rows();
  const std::size_t cols = inputs[0].cols();
  if (rank == 0 || rank > std::min(rows, cols)) throw ContractError("nmf: rank out of range");
  double total = 0.0;
  for (double c : weights) {
    if (!(c >= 0.0)) throw ContractError("nmf: negative weight");
    total += c;
  }
  if (!(total > 0.0)) throw ContractError("nmf: weights sum to zero");
  std::vector<double> c(weights.begin(), weights.end());
  for (double& x : c) x /= total;

  double mean = 0.0;
  for (std::size_t l = 0; l < inputs.size(); ++l) {
    for (double x : inputs[l].data()) {
      if (x < 0.0) throw ContractError("nmf: negative input entry");
      mean += c[l] * x;
    }
  }
  mean /= static_cast<double>(rows * cols);

  NmfResult r;
  random_factors(rows, cols, rank, mean, seed, r.w, r.h);

  auto objective = [&] {
    const Tensor wh = matmul(r.w, r.h);
    double f = 0.0;
    for (std::size_t l = 0; l < inputs.size(); ++l) f += c[l] * frobenius_sq_diff(inputs[l], wh);
    return f;
  };
  r.objective.reserve(iters + 1);
  r.objective.push_back(objective());

  Tensor num_h(rank, cols), den_h(rank, cols), num_w(rows, rank), den_w(rows, rank);
  Tensor wtw(rank, rank), hht(rank, rank);
  for (std::size_t it = 0; it < iters; ++it) {
    // H ← H ∘ Σ c_l WᵀA_l / (WᵀW H)
    num_h.fill(0.0);
    for (std::size_t l = 0; l < inputs.size(); ++l) {
      Tensor part(rank, cols);
      gemm(true, false, r.w, inputs[l], part, false);
      axpy(c[l], part, num_h);
    }
    gemm(true, false, r.w, r.w, wtw, false);
    gemm(false, false, wtw, r.h, den_h, false);
    multiplicative(r.h, num_h, den_h);

    // W ← W ∘ Σ c_l A_l Hᵀ / (W H Hᵀ)
    num_w.fill(0.0);
    for (std::size_t l = 0; l < inputs.size(); ++l) {
      Tensor part(rows, rank);
      gemm(false, true, inputs[l], r.h, part, false);
      axpy(c[l], part, num_w);
    }
    gemm(false, true, r.h, r.h, hht, false);
    gemm(false, false, r.w, hht, den_w, false);
    multiplicative(r.w, num_w, den_w);

    r.objective.push_back(objective());
  }
  return r;
}

Tensor cn_nmf_predict(const Tensor& cn, std::size_t rank, std::size_t iters, std::uint64_t seed) {
  const NmfResult r = nmf(cn, rank, iters, seed);
  return graph::symmetrize_and_clean(matmul(r.w, r.h));
}

Tensor dw_nmf_predict(std::span<const Tensor> inputs, double beta, std::size_t rank,
                      std::size_t iters, std::uint64_t seed) {
  const auto w = decay_weights(inputs.size(), beta);
  const NmfResult r = weighted_nmf(inputs, w, rank, iters, seed);
  return graph::symmetrize_and_clean(matmul(r.w, r.h));
}

// --- FactorizationPredictor ----------------------------------------------------------

FactorizationPredictor::FactorizationPredictor(FactorizationKind kind, CollapseConfig config,
                                               std::size_t window)
    : kind_(kind), config_(config), window_(window) {
  if (window_ == 0) throw ConfigError("window must be at least 1");
}

Tensor FactorizationPredictor::predict(const train::History& history) {
  if (history.end() < window_) throw ConfigError("not enough history for a window");
  config_.validate(history.nodes());
  std::vector<Tensor> inputs;
  inputs.reserve(window_);
  for (std::size_t s = history.end() - window_; s < history.end(); ++s) inputs.push_back(history.scaled(s));
  const std::size_t r = config_.rank_for(history.nodes());
  switch (kind_) {
    case FactorizationKind::kCnSvd:
      return cn_svd_predict(collapse(inputs, config_.beta), r);
    case FactorizationKind::kCnNmf:
      return cn_nmf_predict(collapse(inputs, config_.beta), r, config_.nmf_iters, config_.nmf_seed);
    case FactorizationKind::kDwNmf:
      return dw_nmf_predict(inputs, config_.beta, r, config_.nmf_iters, config_.nmf_seed);
  }
  throw ContractError("unknown factorization kind");
}

// --- SequenceRegressor ------------------------------------------------------------------

SequenceRegressor::SequenceRegressor(CellKind kind, std::size_t nodes, std::size_t hidden,
                                     train::TrainConfig config)
    : kind_(kind),
      nodes_(nodes),
      hidden_(hidden),
      config_(config),
      init_rng_(derive_seed(config.seed, kind == CellKind::kLstm ? "lstm-init" : "gru-init")) {
  config_.validate();
  if (nodes_ < 2 || hidden_ == 0) throw ConfigError("regressor needs n >= 2 and a positive hidden size");
  init();
}

void SequenceRegressor::init() {
  const std::size_t m = graph::pair_count(nodes_);
  if (kind_ == CellKind::kGru) {
    gru_ = model::GruParams::glorot(m, hidden_, init_rng_);
  } else {
    lstm_ = model::LstmParams::glorot(m, hidden_, init_rng_);
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double limit = std::sqrt(6.0 / static_cast<double>(hidden_ + m));
  fc_w_ = Tensor(hidden_, m);
  for (double& x : fc_w_.data()) x = limit * u(init_rng_);
  fc_b_ = Tensor(1, m);
  opt_ = {};
}

std::vector<Tensor*> SequenceRegressor::tensors() {
  std::vector<Tensor*> out;
  if (kind_ == CellKind::kGru) {
    for (auto& [name, t] : gru_.named("")) out.push_back(t);
  } else {
    for (auto& [name, t] : lstm_.named("")) out.push_back(t);
  }
  out.push_back(&fc_w_);
  out.push_back(&fc_b_);
  return out;
}

Var SequenceRegressor::forward(Tape& tape, const std::vector<Var>& params,
                               const train::History& history, std::size_t target) const {
  const std::size_t L = config_.window;
  if (target < L) throw ConfigError("window ending at step " + std::to_string(target) + " is too short");
  std::vector<Var> rows;
  rows.reserve(L);
  for (std::size_t s = target - L; s < target; ++s) rows.push_back(tape.constant(history.upper(s)));
  const Var inputs = concat_rows(rows);
  const std::span<const Var> p(params);
  const std::size_t cell = kind_ == CellKind::kGru ? 9 : 12;
  const Var h = kind_ == CellKind::kGru
                    ? model::gru_sequence(inputs, model::GruVars::from(p.first(cell)))
                    : model::lstm_sequence(inputs, model::LstmVars::from(p.first(cell)));
  return sigmoid(add_row(matmul(h, params[cell]), params[cell + 1]));
}

double SequenceRegressor::update(const train::History& history, std::size_t target) {
  const auto ts = tensors();
  Tape tape;
  const auto params = model::bind(tape, ts, true);
  const Var pred = forward(tape, params, history, target);
  const Var loss = mse(pred, tape.constant(history.upper(target)));
  const auto grads = model::ordered_gradients(tape.backward(loss), ts.size());
  adam_step(ts, grads, opt_, AdamConfig{.lr = config_.lr_g});
  return loss.value().item();
}

void SequenceRegressor::pretrain(const train::History& history, std::span<const std::size_t> targets) {
  for (std::size_t e = 0; e < config_.epochs_pretrain; ++e)
    for (const std::size_t t : targets) update(history, t);
}

void SequenceRegressor::fine_tune(const train::History& history, std::span<const std::size_t> targets) {
  for (std::size_t e = 0; e < config_.epochs_online; ++e)
    for (const std::size_t t : targets) update(history, t);
}

void SequenceRegressor::reset() { init(); }

Tensor SequenceRegressor::predict(const train::History& history) {
  auto ts = tensors();
  Tape tape;
  const auto params = model::bind(tape, ts, false);
  const Var pred = forward(tape, params, history, history.end());
  return graph::from_upper_triangle(pred.value(), nodes_);
}

std::vector<train::PredictionRecord> rnn_baseline_predict(const train::SequenceData& data,
                                                          std::size_t split_t, CellKind kind,
                                                          std::size_t hidden,
                                                          const train::TrainConfig& config) {
  if (split_t < config.window + 1) throw ConfigError("split step leaves no complete window");
  SequenceRegressor regressor(kind, data.nodes(), hidden, config);
  const train::History history(data, split_t);
  regressor.pretrain(history, train::targets_before(split_t, config.window));
  return train::predict_online(regressor, data, split_t, config);
}

}  // namespace hqtlp::baselines
