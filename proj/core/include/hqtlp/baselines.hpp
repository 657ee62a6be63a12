#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hqtlp/model.hpp"
#include "hqtlp/optim.hpp"
#include "hqtlp/training.hpp"

namespace hqtlp::baselines {

struct CollapseConfig {
  double beta = 0.5;          // decay per step back in time, in (0, 1)
  std::size_t rank = 0;       // 0 picks min(16, n/2)
  std::size_t nmf_iters = 300;
  std::uint64_t nmf_seed = 0x5eed;  // fixed factor initialization

  std::size_t rank_for(std::size_t n) const;
  void validate(std::size_t n) const;
};

/// Σ_l β^{L-l} A_l / Σ_l β^{L-l}, l = 1..L (the last input weighs most).
Tensor collapse(std::span<const Tensor> inputs, double beta);

// Rank-r truncated SVD reconstruction of `cn`, cleaned into a valid
// adjacency. Throws ContractError when r is 0 or exceeds n.
Tensor cn_svd_predict(const Tensor& cn, std::size_t rank);

// Raw rank-r SVD reconstruction before cleaning. Singular vectors use a
// fixed sign: the largest-magnitude entry of each left vector is positive.
Tensor truncated_svd(const Tensor& m, std::size_t rank);

struct NmfResult {
  Tensor w;  // n × r
  Tensor h;  // r × n
  std::vector<double> objective;  // objective after init and after each iteration
};

/// Lee–Seung multiplicative updates for min ‖V − WH‖²_F, W, H ≥ 0.
/// Denominators are floored at 1e-12.
NmfResult nmf(const Tensor& v, std::size_t rank, std::size_t iters, std::uint64_t seed);

/// Multiplicative updates for min Σ_l c_l ‖A_l − WH‖²_F with nonnegative
/// weights c_l (normalized to sum to 1).
NmfResult weighted_nmf(std::span<const Tensor> inputs, std::span<const double> weights,
                       std::size_t rank, std::size_t iters, std::uint64_t seed);

Tensor cn_nmf_predict(const Tensor& cn, std::size_t rank, std::size_t iters,
                      std::uint64_t seed = CollapseConfig{}.nmf_seed);

// Decay-weighted NMF: per-snapshot Frobenius terms weighted by β^{L-l}.
Tensor dw_nmf_predict(std::span<const Tensor> inputs, double beta, std::size_t rank,
                      std::size_t iters, std::uint64_t seed = CollapseConfig{}.nmf_seed);

// ---------------------------------------------------------------------------

enum class FactorizationKind { kCnSvd, kCnNmf, kDwNmf };

/// Training-free predictor: factorizes the last `window` scaled snapshots.
class FactorizationPredictor : public train::Predictor {
 public:
  FactorizationPredictor(FactorizationKind kind, CollapseConfig config, std::size_t window);

  void pretrain(const train::History&, std::span<const std::size_t>) override {}
  void fine_tune(const train::History&, std::span<const std::size_t>) override {}
  void reset() override {}
  Tensor predict(const train::History& history) override;

 private:
  FactorizationKind kind_;
  CollapseConfig config_;
  std::size_t window_;
};

enum class CellKind { kLstm, kGru };

/// Reconstruction-only recurrent regressor: the flattened upper triangles of
/// the window feed an LSTM or GRU; a sigmoid FC layer maps the last state to
/// the next upper triangle. Trained with plain MSE.
class SequenceRegressor : public train::Predictor {
 public:
  SequenceRegressor(CellKind kind, std::size_t nodes, std::size_t hidden, train::TrainConfig config);

  void pretrain(const train::History& history, std::span<const std::size_t> targets) override;
  void fine_tune(const train::History& history, std::span<const std::size_t> targets) override;
  void reset() override;
  Tensor predict(const train::History& history) override;

  // One MSE update on the window ending at `target`; returns the loss.
  double update(const train::History& history, std::size_t target);

  std::vector<Tensor*> tensors();

 private:
  Var forward(Tape& tape, const std::vector<Var>& params, const train::History& history,
              std::size_t target) const;
  void init();

  CellKind kind_;
  std::size_t nodes_;
  std::size_t hidden_;
  train::TrainConfig config_;
  Rng init_rng_;
  model::GruParams gru_;
  model::LstmParams lstm_;
  Tensor fc_w_;
  Tensor fc_b_;
  AdamState opt_;
};

/// Pretrain an LSTM/GRU regressor on windows before split_t, then run the
/// shared online protocol.
std::vector<train::PredictionRecord> rnn_baseline_predict(const train::SequenceData& data,
                                                          std::size_t split_t, CellKind kind,
                                                          std::size_t hidden,
                                                          const train::TrainConfig& config);

}  // namespace hqtlp::baselines
