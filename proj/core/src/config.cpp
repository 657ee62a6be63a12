#include "hqtlp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hqtlp/errors.hpp"

namespace hqtlp::cli {

namespace {

using json = nlohmann::json;
using Setter = std::function<void(const json&)>;

template <class T>
T as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError("");
    } else {
      if (!v.is_string()) throw ConfigError("");
    }
    return v.get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <class T>
Setter field(T& target, std::string key) {
  return [&target, key = std::move(key)](const json& v) { target = as<T>(v, key); };
}

void apply_section(const json& j, const std::string& section, const std::map<std::string, Setter>& fields) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw ConfigError("unknown config key '" + (section.empty() ? key : section + "." + key) + "'");
    }
    it->second(value);
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& name) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(name + " must be a nonnegative integer, got '" + s + "'");
  }
  return v;
}

}  // namespace

RunConfig::RunConfig() : methods(all_methods()) {}

void RunConfig::validate() const {
  train.validate();
  if (test_steps == 0) throw ConfigError("test_steps must be at least 1");
  if (methods.empty()) throw ConfigError("no methods requested");
  for (const auto& m : methods) {
    const auto known = all_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) throw ConfigError("unknown method '" + m + "'");
  }
  if (!(collapse.beta > 0.0 && collapse.beta < 1.0)) throw ConfigError("collapse.beta must lie in (0, 1)");
  if (collapse.nmf_iters == 0) throw ConfigError("collapse.nmf_iters must be at least 1");
}

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  auto& t = c.train;
  auto& m = c.model;
  auto& s = c.synth;
  std::string mismatch = std::string(metrics::to_string(t.mismatch_base));

  const std::map<std::string, Setter> train_fields{
      {"window", field(t.window, "train.window")},
      {"lambda_rec", field(t.lambda_rec, "train.lambda_rec")},
      {"lambda_adv", field(t.lambda_adv, "train.lambda_adv")},
      {"epochs_pretrain", field(t.epochs_pretrain, "train.epochs_pretrain")},
      {"epochs_online", field(t.epochs_online, "train.epochs_online")},
      {"d_steps_per_g_step", field(t.d_steps_per_g_step, "train.d_steps_per_g_step")},
      {"lr_g", field(t.lr_g, "train.lr_g")},
      {"lr_d", field(t.lr_d, "train.lr_d")},
      {"seed", field(t.seed, "train.seed")},
      {"noise_draws", field(t.noise_draws, "train.noise_draws")},
      {"online_all_windows", field(t.online_all_windows, "train.online_all_windows")},
      {"retrain_from_scratch", field(t.retrain_from_scratch, "train.retrain_from_scratch")},
  };
  const std::map<std::string, Setter> model_fields{
      {"noise_dim", field(m.noise_dim, "model.noise_dim")},
      {"gcn1_dim", field(m.gcn1_dim, "model.gcn1_dim")},
      {"gcn2_dim", field(m.gcn2_dim, "model.gcn2_dim")},
      {"hidden_dim", field(m.hidden_dim, "model.hidden_dim")},
      {"disc_hidden1", field(m.disc_hidden1, "model.disc_hidden1")},
      {"disc_hidden2", field(m.disc_hidden2, "model.disc_hidden2")},
  };
  const std::map<std::string, Setter> collapse_fields{
      {"beta", field(c.collapse.beta, "collapse.beta")},
      {"rank", field(c.collapse.rank, "collapse.rank")},
      {"nmf_iters", field(c.collapse.nmf_iters, "collapse.nmf_iters")},
  };
  const std::map<std::string, Setter> metrics_fields{
      {"threshold", field(t.threshold, "metrics.threshold")},
      {"mismatch_base", field(mismatch, "metrics.mismatch_base")},
  };
  std::map<std::string, Setter> synth_fields{
      {"nodes", field(s.nodes, "synth.nodes")},
      {"steps", field(s.steps, "synth.steps")},
      {"sparsity", field(s.sparsity, "synth.sparsity")},
      {"w_hi", field(s.w_hi, "synth.w_hi")},
      {"burst_prob", field(s.burst_prob, "synth.burst_prob")},
      {"burst_min", field(s.burst_min, "synth.burst_min")},
      {"burst_max", field(s.burst_max, "synth.burst_max")},
      {"drift", field(s.drift, "synth.drift")},
      {"mean_reversion", field(s.mean_reversion, "synth.mean_reversion")},
      {"volatility", field(s.volatility, "synth.volatility")},
      {"level_lo", field(s.level_lo, "synth.level_lo")},
      {"level_hi", field(s.level_hi, "synth.level_hi")},
      {"seed", field(s.seed, "synth.seed")},
  };

  const std::map<std::string, Setter> top{
      {"dataset", field(c.dataset, "dataset")},
      {"out", field(c.out, "out")},
      {"test_steps", field(c.test_steps, "test_steps")},
      {"methods",
       [&](const json& v) {
         if (!v.is_array()) throw ConfigError("config key 'methods' must be an array of names");
         std::string joined;
         for (const auto& e : v) joined += (joined.empty() ? "" : ",") + as<std::string>(e, "methods");
         c.methods = parse_methods(joined);
       }},
      {"train", [&](const json& v) { apply_section(v, "train", train_fields); }},
      {"model", [&](const json& v) { apply_section(v, "model", model_fields); }},
      {"collapse", [&](const json& v) { apply_section(v, "collapse", collapse_fields); }},
      {"metrics", [&](const json& v) { apply_section(v, "metrics", metrics_fields); }},
      {"synth",
       [&](const json& v) {
         if (!v.is_object()) throw ConfigError("config section 'synth' must be an object");
         // A preset provides the base values; explicit keys override it.
         if (v.contains("preset")) {
           const auto seed = s.seed;
           s = data::preset(as<std::string>(v.at("preset"), "synth.preset"));
           s.seed = seed;
         }
         json rest = v;
         rest.erase("preset");
         apply_section(rest, "synth", synth_fields);
       }},
  };
  apply_section(j, "", top);
  try {
    t.mismatch_base = metrics::parse_mismatch_base(mismatch);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  const auto& t = c.train;
  const auto& m = c.model;
  const auto& s = c.synth;
  return json{
      {"dataset", c.dataset},
      {"methods", c.methods},
      {"out", c.out},
      {"test_steps", c.test_steps},
      {"train",
       {{"window", t.window},
        {"lambda_rec", t.lambda_rec},
        {"lambda_adv", t.lambda_adv},
        {"epochs_pretrain", t.epochs_pretrain},
        {"epochs_online", t.epochs_online},
        {"d_steps_per_g_step", t.d_steps_per_g_step},
        {"lr_g", t.lr_g},
        {"lr_d", t.lr_d},
        {"seed", t.seed},
        {"noise_draws", t.noise_draws},
        {"online_all_windows", t.online_all_windows},
        {"retrain_from_scratch", t.retrain_from_scratch}}},
      {"model",
       {{"noise_dim", m.noise_dim},
        {"gcn1_dim", m.gcn1_dim},
        {"gcn2_dim", m.gcn2_dim},
        {"hidden_dim", m.hidden_dim},
        {"disc_hidden1", m.disc_hidden1},
        {"disc_hidden2", m.disc_hidden2}}},
      {"collapse", {{"beta", c.collapse.beta}, {"rank", c.collapse.rank}, {"nmf_iters", c.collapse.nmf_iters}}},
      {"metrics", {{"threshold", t.threshold}, {"mismatch_base", std::string(metrics::to_string(t.mismatch_base))}}},
      {"synth",
       {{"nodes", s.nodes},
        {"steps", s.steps},
        {"sparsity", s.sparsity},
        {"w_hi", s.w_hi},
        {"burst_prob", s.burst_prob},
        {"burst_min", s.burst_min},
        {"burst_max", s.burst_max},
        {"drift", s.drift},
        {"mean_reversion", s.mean_reversion},
        {"volatility", s.volatility},
        {"level_lo", s.level_lo},
        {"level_hi", s.level_hi},
        {"seed", s.seed}}},
  };
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

void apply_env(RunConfig& config, const EnvLookup& env) {
  if (const auto v = env("HQTLP_SEED")) {
    config.train.seed = parse_u64(*v, "HQTLP_SEED");
    config.synth.seed = config.train.seed;
  }
  if (const auto v = env("HQTLP_WINDOW")) config.train.window = parse_u64(*v, "HQTLP_WINDOW");
  if (const auto v = env("HQTLP_TEST_STEPS")) config.test_steps = parse_u64(*v, "HQTLP_TEST_STEPS");
  if (const auto v = env("HQTLP_METHODS")) config.methods = parse_methods(*v);
  if (const auto v = env("HQTLP_OUT")) config.out = *v;
}

std::vector<std::string> all_methods() { return {"hqtlp", "lstm", "gru", "cn-svd", "cn-nmf", "dw-nmf"}; }

std::vector<std::string> parse_methods(const std::string& list) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::stringstream ss(list);
  std::string name;
  const auto known = all_methods();
  while (std::getline(ss, name, ',')) {
    name.erase(0, name.find_first_not_of(" \t"));
    name.erase(name.find_last_not_of(" \t") + 1);
    if (name.empty()) continue;
    if (name == "all") {
      for (const auto& k : known)
        if (seen.insert(k).second) out.push_back(k);
      continue;
    }
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown method '" + name + "' (known: hqtlp, lstm, gru, cn-svd, cn-nmf, dw-nmf)");
    }
    if (!seen.insert(name).second) throw ConfigError("method '" + name + "' listed twice");
    out.push_back(name);
  }
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

}  // namespace hqtlp::cli
