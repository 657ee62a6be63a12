#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hqtlp/dyngraph.hpp"
#include "hqtlp/metrics.hpp"
#include "hqtlp/model.hpp"
#include "hqtlp/optim.hpp"
#include "hqtlp/random.hpp"

namespace hqtlp::train {

struct TrainConfig {
  std::size_t window = 10;
  double lambda_rec = 1.0;
  double lambda_adv = 0.01;  // 0 turns HQ-TLP into a pure reconstruction model
  std::size_t epochs_pretrain = 200;
  std::size_t epochs_online = 20;  // fine-tune epochs per new time step
  std::size_t d_steps_per_g_step = 1;
  double lr_g = 1e-3;
  double lr_d = 1e-3;
  std::uint64_t seed = 0;
  // Edge threshold as a fraction of w_max (tau_abs = threshold * w_max).
  double threshold = 1e-3;
  // Noise draws averaged per prediction.
  std::size_t noise_draws = 1;
  // Fine-tune on every fully observed window instead of only the newest.
  bool online_all_windows = false;
  // Re-initialize and retrain on all observed windows at every test step.
  bool retrain_from_scratch = false;
  metrics::MismatchBase mismatch_base = metrics::MismatchBase::kUnion;

  void validate() const;
};

/// Per-step model inputs derived once from a network: scaled snapshots, their
/// GCN normalizations and upper triangles. Scaling uses steps [0, train_steps).
class SequenceData {
 public:
  SequenceData(graph::DynamicNetwork original, std::size_t train_steps);

  std::size_t nodes() const noexcept { return original_.nodes(); }
  std::size_t steps() const noexcept { return original_.steps(); }
  std::size_t train_steps() const noexcept { return scaled_.train_steps; }
  double w_max() const noexcept { return scaled_.w_max; }
  std::size_t clamped() const noexcept { return scaled_.clamped; }

  const graph::DynamicNetwork& original() const noexcept { return original_; }
  const graph::DynamicNetwork& scaled() const noexcept { return scaled_.net; }
  const Tensor& a_hat(std::size_t t) const { return a_hat_[t]; }
  const Tensor& upper(std::size_t t) const { return upper_[t]; }

 private:
  graph::DynamicNetwork original_;
  graph::ScaledNetwork scaled_;
  std::vector<Tensor> a_hat_;
  std::vector<Tensor> upper_;
};

/// Read access to steps [0, end) of a SequenceData. Methods receive only
/// this view, so a prediction for step `end` cannot see the snapshot it is
/// predicting.
class History {
 public:
  History(const SequenceData& data, std::size_t end);

  std::size_t end() const noexcept { return end_; }
  std::size_t nodes() const noexcept { return data_->nodes(); }
  double w_max() const noexcept { return data_->w_max(); }

  const Tensor& scaled(std::size_t t) const;
  const Tensor& a_hat(std::size_t t) const;
  const Tensor& upper(std::size_t t) const;

 private:
  void check(std::size_t t) const;

  const SequenceData* data_;
  std::size_t end_;
};

struct PredictionRecord {
  std::size_t t = 0;
  graph::Snapshot pred;   // original units
  graph::Snapshot truth;  // original units
  metrics::MetricReport metrics;
};

metrics::Averages aggregate(std::span<const PredictionRecord> records);

/// λ_rec · MSE(pred, truth over i<j) + λ_adv · (−log d_score).
double loss_g(const Tensor& pred_scaled, const Tensor& truth_scaled, double d_score,
              const TrainConfig& config);
/// −log d_real − log(1 − d_fake).
double loss_d(double d_real, double d_fake);

struct TrainEvent {
  std::size_t epoch = 0;
  std::size_t target = 0;  // window target step
  double loss_g = 0.0;
  double loss_d = 0.0;     // last discriminator loss for this window (0 without D)
  const model::GeneratorParams* generator = nullptr;  // after the update
};
using TrainObserver = std::function<void(const TrainEvent&)>;

/// A temporal link predictor driven by the shared online protocol.
class Predictor {
 public:
  virtual ~Predictor() = default;

  // Train on the windows ending at `targets` (each < history.end()).
  virtual void pretrain(const History& history, std::span<const std::size_t> targets) = 0;
  virtual void fine_tune(const History& history, std::span<const std::size_t> targets) = 0;
  // Discard learned state (used by retrain_from_scratch).
  virtual void reset() = 0;
  // Scaled n×n prediction of step history.end() from the last `window`
  // snapshots of the history.
  virtual Tensor predict(const History& history) = 0;
};

/// Single generator update on the window ending at `target`. With
/// `discriminator` null the adversarial term is omitted entirely.
double generator_update(const History& history, std::size_t target, std::size_t window,
                        model::GeneratorParams& generator, AdamState& optimizer,
                        const model::DiscriminatorParams* discriminator,
                        const TrainConfig& config, Rng& noise_rng);

/// Single discriminator update: real = truth at `target`, fake = a fresh
/// generator sample.
double discriminator_update(const History& history, std::size_t target, std::size_t window,
                            const model::GeneratorParams& generator,
                            model::DiscriminatorParams& discriminator, AdamState& optimizer,
                            const TrainConfig& config, Rng& disc_rng);

/// The adversarial model: generator, discriminator, their optimizer states
/// and two random streams. Generator-update noise and discriminator-sample
/// noise are drawn from separate streams so discriminator updates never
/// change what the generator sees.
class HqtlpModel : public Predictor {
 public:
  HqtlpModel(model::ModelDims dims, TrainConfig config);
  HqtlpModel(model::ModelDims dims, TrainConfig config, model::GeneratorParams generator,
             model::DiscriminatorParams discriminator);

  void train(const History& history, std::span<const std::size_t> targets, std::size_t epochs);

  void pretrain(const History& history, std::span<const std::size_t> targets) override;
  void fine_tune(const History& history, std::span<const std::size_t> targets) override;
  void reset() override;
  Tensor predict(const History& history) override;

  void set_observer(TrainObserver observer) { observer_ = std::move(observer); }
  const model::ModelDims& dims() const noexcept { return dims_; }
  const model::GeneratorParams& generator() const noexcept { return generator_; }
  const model::DiscriminatorParams& discriminator() const noexcept { return discriminator_; }

 private:
  model::ModelDims dims_;
  TrainConfig config_;
  Rng init_rng_;
  Rng noise_rng_;
  Rng disc_rng_;
  model::GeneratorParams generator_;
  model::DiscriminatorParams discriminator_;
  AdamState g_opt_;
  AdamState d_opt_;
  TrainObserver observer_;
  std::size_t epoch_counter_ = 0;
};

struct AdversarialResult {
  model::GeneratorParams generator;
  model::DiscriminatorParams discriminator;
};

/// Alternating minimax training: per epoch, per window in order,
/// d_steps_per_g_step discriminator updates then one generator update.
/// Throws ConfigError for an empty target list.
AdversarialResult train_adversarial(const History& history, std::span<const std::size_t> targets,
                                    model::GeneratorParams generator,
                                    model::DiscriminatorParams discriminator,
                                    const TrainConfig& config, std::size_t epochs,
                                    const TrainObserver& observer = {});

/// Discriminator-free reconstruction training of the generator, consuming
/// the generator noise stream exactly as train_adversarial does.
model::GeneratorParams train_reconstruction(const History& history,
                                            std::span<const std::size_t> targets,
                                            model::GeneratorParams generator,
                                            const TrainConfig& config, std::size_t epochs,
                                            const TrainObserver& observer = {});

// Window targets L .. end-1 available in a history ending at `end`.
std::vector<std::size_t> targets_before(std::size_t end, std::size_t window);

/// Online protocol for test steps split_t .. T-1: fine-tune on the newest
/// fully observed window (target t-1), then predict t from t-L .. t-1.
/// The predictor must already be pretrained on targets < split_t. Needs
/// split_t >= L; a step with no complete window before it is predicted
/// without fine-tuning.
std::vector<PredictionRecord> predict_online(Predictor& predictor, const SequenceData& data,
                                             std::size_t split_t, const TrainConfig& config);

/// Pretrain on every window with target < data.train_steps(), then run
/// predict_online from there.
std::vector<PredictionRecord> run_protocol(Predictor& predictor, const SequenceData& data,
                                           const TrainConfig& config);

}  // namespace hqtlp::train
