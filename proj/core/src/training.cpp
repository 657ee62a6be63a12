#include "hqtlp/training.hpp"

#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp::train {

void TrainConfig::validate() const {
  if (window == 0) throw ConfigError("window must be at least 1");
  if (!(lambda_rec > 0.0)) throw ConfigError("lambda_rec must be positive");
  if (!(lambda_adv >= 0.0)) throw ConfigError("lambda_adv must be nonnegative");
  if (d_steps_per_g_step == 0) throw ConfigError("d_steps_per_g_step must be at least 1");
  if (!(lr_g >= 0.0) || !(lr_d >= 0.0)) throw ConfigError("learning rates must be nonnegative");
  if (!(threshold >= 0.0)) throw ConfigError("threshold must be nonnegative");
  if (noise_draws == 0) throw ConfigError("noise_draws must be at least 1");
}

// --- data views ------------------------------------------------------------------

SequenceData::SequenceData(graph::DynamicNetwork original, std::size_t train_steps)
    : original_(std::move(original)), scaled_(graph::scale_weights(original_, train_steps)) {
  a_hat_.reserve(steps());
  upper_.reserve(steps());
  for (const auto& s : scaled_.net.snapshots()) {
    a_hat_.push_back(graph::gcn_normalize(s.adj));
    upper_.push_back(graph::upper_triangle(s.adj));
  }
}

History::History(const SequenceData& data, std::size_t end) : data_(&data), end_(end) {
  if (end > data.steps()) throw ContractError("history extends past the last snapshot");
}

void History::check(std::size_t t) const {
  if (t >= end_) {
    throw ContractError("step " + std::to_string(t) + " is not observed yet (history ends at " +
                        std::to_string(end_) + ")");
  }
}

const Tensor& History::scaled(std::size_t t) const {
  check(t);
  return data_->scaled()[t].adj;
}

const Tensor& History::a_hat(std::size_t t) const {
  check(t);
  return data_->a_hat(t);
}

const Tensor& History::upper(std::size_t t) const {
  check(t);
  return data_->upper(t);
}

metrics::Averages aggregate(std::span<const PredictionRecord> records) {
  std::vector<metrics::MetricReport> reports;
  reports.reserve(records.size());
  for (const auto& r : records) reports.push_back(r.metrics);
  return metrics::aggregate(reports);
}

// --- losses ------------------------------------------------------------------

double loss_g(const Tensor& pred_scaled, const Tensor& truth_scaled, double d_score,
              const TrainConfig& config) {
  const Tensor p = graph::upper_triangle(pred_scaled);
  const Tensor t = graph::upper_triangle(truth_scaled);
  double mse = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) mse += (p[k] - t[k]) * (p[k] - t[k]);
  if (p.size() > 0) mse /= static_cast<double>(p.size());
  double loss = config.lambda_rec * mse;
  if (config.lambda_adv != 0.0) loss += config.lambda_adv * -std::log(d_score);
  return loss;
}

double loss_d(double d_real, double d_fake) { return -std::log(d_real) - std::log1p(-d_fake); }

// --- single updates ----------------------------------------------------------------

namespace {

void gather_window(const History& history, std::size_t target, std::size_t window,
                   std::vector<Tensor>& a_hats) {
  if (target < window) throw ConfigError("window ending at step " + std::to_string(target) + " is too short");
  a_hats.clear();
  for (std::size_t s = target - window; s < target; ++s) a_hats.push_back(history.a_hat(s));
}

model::ModelDims dims_of(const model::GeneratorParams& g, std::size_t nodes) {
  model::ModelDims d;
  d.nodes = nodes;
  d.noise_dim = g.gcn1.rows();
  d.gcn1_dim = g.gcn1.cols();
  d.gcn2_dim = g.gcn2.cols();
  d.hidden_dim = g.gru.u_r.rows();
  return d;
}

// Upper-triangle generator output for the given inputs, averaged over draws.
Tensor sample_generator(const std::vector<Tensor>& a_hats, const model::GeneratorParams& g,
                        const model::ModelDims& dims, Rng& rng, std::size_t draws) {
  Tensor acc;
  for (std::size_t k = 0; k < draws; ++k) {
    const auto noise = model::draw_noise(rng, a_hats.size(), dims);
    Tape tape;
    const auto vars = model::bind_generator(tape, g, false);
    const Var out = model::generator_forward(tape, vars, a_hats, noise);
    if (k == 0) {
      acc = out.value();
    } else {
      axpy(1.0, out.value(), acc);
    }
  }
  if (draws > 1) acc = hqtlp::scale(acc, 1.0 / static_cast<double>(draws));
  return acc;
}

}  // namespace

double generator_update(const History& history, std::size_t target, std::size_t window,
                        model::GeneratorParams& generator, AdamState& optimizer,
                        const model::DiscriminatorParams* discriminator,
                        const TrainConfig& config, Rng& noise_rng) {
  std::vector<Tensor> a_hats;
  gather_window(history, target, window, a_hats);
  const model::ModelDims dims = dims_of(generator, history.nodes());
  const auto noise = model::draw_noise(noise_rng, window, dims);

  Tape tape;
  const auto g = model::bind_generator(tape, generator, true);
  const Var pred = model::generator_forward(tape, g, a_hats, noise);
  Var loss = scale(mse(pred, tape.constant(history.upper(target))), config.lambda_rec);
  if (discriminator != nullptr) {
    const auto d = model::bind_discriminator(tape, *discriminator, false);
    // −log σ(logit) = softplus(−logit)
    const Var fool = softplus(scale(model::discriminator_logit(d, pred), -1.0));
    loss = add(loss, scale(fool, config.lambda_adv));
  }
  const auto tensors = generator.tensors();
  const auto grads = model::ordered_gradients(tape.backward(loss), tensors.size());
  adam_step(tensors, grads, optimizer, AdamConfig{.lr = config.lr_g});
  return loss.value().item();
}

double discriminator_update(const History& history, std::size_t target, std::size_t window,
                            const model::GeneratorParams& generator,
                            model::DiscriminatorParams& discriminator, AdamState& optimizer,
                            const TrainConfig& config, Rng& disc_rng) {
  std::vector<Tensor> a_hats;
  gather_window(history, target, window, a_hats);
  const model::ModelDims dims = dims_of(generator, history.nodes());
  const Tensor fake = sample_generator(a_hats, generator, dims, disc_rng, 1);

  Tape tape;
  const auto d = model::bind_discriminator(tape, discriminator, true);
  const Var real_logit = model::discriminator_logit(d, tape.constant(history.upper(target)));
  const Var fake_logit = model::discriminator_logit(d, tape.constant(fake));
  // −log σ(real) − log(1 − σ(fake))
  const Var loss = add(softplus(scale(real_logit, -1.0)), softplus(fake_logit));
  const auto tensors = discriminator.tensors();
  const auto grads = model::ordered_gradients(tape.backward(loss), tensors.size());
  adam_step(tensors, grads, optimizer, AdamConfig{.lr = config.lr_d});
  return loss.value().item();
}

// --- HqtlpModel --------------------------------------------------------------------

HqtlpModel::HqtlpModel(model::ModelDims dims, TrainConfig config)
    : dims_(dims),
      config_(config),
      init_rng_(derive_seed(config.seed, "init")),
      noise_rng_(derive_seed(config.seed, "noise")),
      disc_rng_(derive_seed(config.seed, "disc")) {
  config_.validate();
  generator_ = model::GeneratorParams::init(dims_, init_rng_);
  discriminator_ = model::DiscriminatorParams::init(dims_, init_rng_);
}

HqtlpModel::HqtlpModel(model::ModelDims dims, TrainConfig config, model::GeneratorParams generator,
                       model::DiscriminatorParams discriminator)
    : dims_(dims),
      config_(config),
      init_rng_(derive_seed(config.seed, "init")),
      noise_rng_(derive_seed(config.seed, "noise")),
      disc_rng_(derive_seed(config.seed, "disc")),
      generator_(std::move(generator)),
      discriminator_(std::move(discriminator)) {
  config_.validate();
}

void HqtlpModel::train(const History& history, std::span<const std::size_t> targets,
                       std::size_t epochs) {
  if (targets.empty()) throw ConfigError("training needs at least one window");
  const bool adversarial = config_.lambda_adv > 0.0;
  for (std::size_t e = 0; e < epochs; ++e, ++epoch_counter_) {
    for (const std::size_t target : targets) {
      double last_d = 0.0;
      for (std::size_t k = 0; k < config_.d_steps_per_g_step; ++k) {
        last_d = discriminator_update(history, target, config_.window, generator_, discriminator_,
                                      d_opt_, config_, disc_rng_);
      }
      const double lg = generator_update(history, target, config_.window, generator_, g_opt_,
                                         adversarial ? &discriminator_ : nullptr, config_,
                                         noise_rng_);
      if (observer_) observer_(TrainEvent{epoch_counter_, target, lg, last_d, &generator_});
    }
  }
}

void HqtlpModel::pretrain(const History& history, std::span<const std::size_t> targets) {
  if (config_.epochs_pretrain > 0) train(history, targets, config_.epochs_pretrain);
}

void HqtlpModel::fine_tune(const History& history, std::span<const std::size_t> targets) {
  if (config_.epochs_online > 0) train(history, targets, config_.epochs_online);
}

void HqtlpModel::reset() {
  generator_ = model::GeneratorParams::init(dims_, init_rng_);
  discriminator_ = model::DiscriminatorParams::init(dims_, init_rng_);
  g_opt_ = {};
  d_opt_ = {};
}

Tensor HqtlpModel::predict(const History& history) {
  std::vector<Tensor> a_hats;
  gather_window(history, history.end(), config_.window, a_hats);
  const Tensor upper = sample_generator(a_hats, generator_, dims_, noise_rng_, config_.noise_draws);
  return graph::from_upper_triangle(upper, dims_.nodes);
}

AdversarialResult train_adversarial(const History& history, std::span<const std::size_t> targets,
                                    model::GeneratorParams generator,
                                    model::DiscriminatorParams discriminator,
                                    const TrainConfig& config, std::size_t epochs,
                                    const TrainObserver& observer) {
  if (targets.empty()) throw ConfigError("train_adversarial: no windows");
  model::ModelDims dims = dims_of(generator, history.nodes());
  dims.disc_hidden1 = discriminator.w1.cols();
  dims.disc_hidden2 = discriminator.w2.cols();
  HqtlpModel m(dims, config, std::move(generator), std::move(discriminator));
  if (observer) m.set_observer(observer);
  m.train(history, targets, epochs);
  return {m.generator(), m.discriminator()};
}

model::GeneratorParams train_reconstruction(const History& history,
                                            std::span<const std::size_t> targets,
                                            model::GeneratorParams generator,
                                            const TrainConfig& config, std::size_t epochs,
                                            const TrainObserver& observer) {
  if (targets.empty()) throw ConfigError("train_reconstruction: no windows");
  config.validate();
  Rng noise_rng(derive_seed(config.seed, "noise"));
  AdamState opt;
  for (std::size_t e = 0; e < epochs; ++e) {
    for (const std::size_t target : targets) {
      const double lg = generator_update(history, target, config.window, generator, opt, nullptr,
                                         config, noise_rng);
      if (observer) observer(TrainEvent{e, target, lg, 0.0, &generator});
    }
  }
  return generator;
}

// --- online protocol -----------------------------------------------------------------

std::vector<std::size_t> targets_before(std::size_t end, std::size_t window) {
  std::vector<std::size_t> out;
  for (std::size_t t = window; t < end; ++t) out.push_back(t);
  return out;
}

std::vector<PredictionRecord> predict_online(Predictor& predictor, const SequenceData& data,
                                             std::size_t split_t, const TrainConfig& config) {
  config.validate();
  const std::size_t L = config.window;
  if (split_t < L) {
    throw ConfigError("split step " + std::to_string(split_t) + " leaves fewer than " + std::to_string(L) +
                      " snapshots before it");
  }
  if (split_t > data.steps()) throw ConfigError("split step lies beyond the last snapshot");

  const double tau_abs = config.threshold * data.w_max();
  std::vector<PredictionRecord> records;
  records.reserve(data.steps() - split_t);
  for (std::size_t t = split_t; t < data.steps(); ++t) {
    const History history(data, t);
    // at t == L no window is complete yet, so only predict
    const bool can_learn = t > L;
    if (can_learn && config.retrain_from_scratch) {
      predictor.reset();
      predictor.pretrain(history, targets_before(t, L));
    } else if (can_learn && config.epochs_online > 0) {
      if (config.online_all_windows) {
        predictor.fine_tune(history, targets_before(t, L));
      } else {
        const std::size_t newest = t - 1;
        predictor.fine_tune(history, std::span(&newest, 1));
      }
    }
    Tensor pred = graph::unscale(graph::symmetrize_and_clean(predictor.predict(history)), data.w_max());

    PredictionRecord r;
    r.t = t;
    r.truth = data.original()[t];
    r.metrics = metrics::evaluate(pred, r.truth.adj, tau_abs, config.mismatch_base);
    r.pred = graph::Snapshot{std::move(pred), t};
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PredictionRecord> run_protocol(Predictor& predictor, const SequenceData& data,
                                           const TrainConfig& config) {
  const std::size_t split = data.train_steps();
  if (split < config.window + 1) {
    throw ConfigError("training portion of " + std::to_string(split) +
                      " steps is too short for window " + std::to_string(config.window));
  }
  const History history(data, split);
  predictor.pretrain(history, targets_before(split, config.window));
  return predict_online(predictor, data, split, config);
}

}  // namespace hqtlp::train
