#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hqtlp/baselines.hpp"
#include "hqtlp/datagen.hpp"
#include "hqtlp/model.hpp"
#include "hqtlp/training.hpp"

namespace hqtlp::cli {

/// Everything a run needs. JSON layout:
///
///   {
///     "dataset": "path/to/edges.tsv",       // empty: generate from "synth"
///     "methods": ["hqtlp", "gru", ...],
///     "out": "results",
///     "test_steps": 50,
///     "train":    { "window", "lambda_rec", "lambda_adv", "epochs_pretrain",
///                   "epochs_online", "d_steps_per_g_step", "lr_g", "lr_d",
///                   "seed", "noise_draws", "online_all_windows",
///                   "retrain_from_scratch" },
///     "model":    { "noise_dim", "gcn1_dim", "gcn2_dim", "hidden_dim",
///                   "disc_hidden1", "disc_hidden2" },
///     "collapse": { "beta", "rank", "nmf_iters" },
///     "metrics":  { "threshold", "mismatch_base" },
///     "synth":    { "preset", "nodes", "steps", "sparsity", "w_hi",
///                   "burst_prob", "burst_min", "burst_max", "drift",
///                   "mean_reversion", "volatility", "level_lo", "level_hi",
///                   "seed" }
///   }
///
/// Every key is optional; unknown keys are rejected with ConfigError.
struct RunConfig {
  std::string dataset;
  std::vector<std::string> methods;  // defaults to all methods
  std::string out = "results";
  std::size_t test_steps = 50;
  train::TrainConfig train;
  model::ModelDims model;  // `nodes` is taken from the data
  baselines::CollapseConfig collapse;
  data::SynthConfig synth;

  RunConfig();
  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

/// Applies HQTLP_SEED, HQTLP_WINDOW, HQTLP_TEST_STEPS, HQTLP_METHODS and
/// HQTLP_OUT on top of `config`. HQTLP_SEED sets both the training and the
/// synthetic-data seed.
void apply_env(RunConfig& config, const EnvLookup& env = process_env);

std::vector<std::string> all_methods();
// Comma-separated list; "all" expands to every method. Throws ConfigError
// for unknown or repeated names.
std::vector<std::string> parse_methods(const std::string& list);

}  // namespace hqtlp::cli
