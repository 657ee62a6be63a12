#include "hqtlp/bench.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <thread>

#include "hqtlp/baselines.hpp"
#include "hqtlp/datagen.hpp"
#include "hqtlp/errors.hpp"

namespace hqtlp::cli {

std::size_t bench_split(std::size_t steps, std::size_t window, std::size_t test_steps) {
  if (steps <= window + test_steps) {
    throw ConfigError("dataset has " + std::to_string(steps) + " snapshots; need more than window (" +
                      std::to_string(window) + ") + test_steps (" + std::to_string(test_steps) + ")");
  }
  return steps - test_steps;
}

std::uint64_t method_seed(std::uint64_t seed, const std::string& method) { return derive_seed(seed, method); }

std::vector<train::PredictionRecord> run_method(const std::string& method, const train::SequenceData& data,
                                                std::size_t split_t, const RunConfig& config) {
  train::TrainConfig tc = config.train;
  tc.seed = method_seed(config.train.seed, method);
  if (method == "hqtlp") {
    model::ModelDims dims = config.model;
    dims.nodes = data.nodes();
    train::HqtlpModel model(dims, tc);
    const train::History history(data, split_t);
    model.pretrain(history, train::targets_before(split_t, tc.window));
    return train::predict_online(model, data, split_t, tc);
  }
  if (method == "lstm" || method == "gru") {
    const auto kind = method == "lstm" ? baselines::CellKind::kLstm : baselines::CellKind::kGru;
    return baselines::rnn_baseline_predict(data, split_t, kind, config.model.hidden_dim, tc);
  }
  baselines::FactorizationKind kind;
  if (method == "cn-svd") {
    kind = baselines::FactorizationKind::kCnSvd;
  } else if (method == "cn-nmf") {
    kind = baselines::FactorizationKind::kCnNmf;
  } else if (method == "dw-nmf") {
    kind = baselines::FactorizationKind::kDwNmf;
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  config.collapse.validate(data.nodes());
  baselines::FactorizationPredictor predictor(kind, config.collapse, tc.window);
  return train::predict_online(predictor, data, split_t, tc);
}

BenchResult run_bench(const graph::DynamicNetwork& net, const RunConfig& config, bool parallel,
                      const ProgressFn& progress) {
  config.validate();
  BenchResult result;
  result.split_t = bench_split(net.steps(), config.train.window, config.test_steps);
  for (const auto& m : config.methods) {
    if (m == "cn-svd" || m == "cn-nmf" || m == "dw-nmf") config.collapse.validate(net.nodes());
  }
  const train::SequenceData data(net, result.split_t);
  result.w_max = data.w_max();
  result.methods.resize(config.methods.size());

  auto run_one = [&](std::size_t k) {
    MethodResult& r = result.methods[k];
    r.method = config.methods[k];
    const auto start = std::chrono::steady_clock::now();
    r.records = run_method(r.method, data, result.split_t, config);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.averages = train::aggregate(r.records);
  };

  if (!parallel) {
    for (std::size_t k = 0; k < result.methods.size(); ++k) {
      run_one(k);
      if (progress) progress(result.methods[k].method, result.methods[k].averages, result.methods[k].wall_seconds);
    }
    return result;
  }
  std::vector<std::exception_ptr> errors(result.methods.size());
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < result.methods.size(); ++k) {
    workers.emplace_back([&, k] {
      try {
        run_one(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (progress) {
    for (const auto& r : result.methods) progress(r.method, r.averages, r.wall_seconds);
  }
  return result;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_method_csv(std::ostream& out, const MethodResult& result) {
  out << "t,rmse,ew_kl,mr\n";
  for (const auto& r : result.records) {
    out << r.t << ',' << format_double(r.metrics.rmse) << ',' << format_double(r.metrics.ew_kl) << ','
        << format_double(r.metrics.mr) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const BenchResult& result) {
  out << "method,armse,aew_kl,amr,wall_seconds\n";
  for (const auto& m : result.methods) {
    out << m.method << ',' << format_double(m.averages.armse) << ',' << format_double(m.averages.aew_kl) << ','
        << format_double(m.averages.amr) << ',' << format_double(m.wall_seconds) << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_bench(const BenchResult& result, const RunConfig& config, const std::filesystem::path& out,
                 bool save_predictions, std::size_t nodes, std::size_t steps) {
  std::filesystem::create_directories(out);
  for (const auto& m : result.methods) {
    auto f = open_out(out / (m.method + ".csv"));
    write_method_csv(f, m);
    if (save_predictions) {
      std::vector<Tensor> adj(steps, Tensor(nodes, nodes));
      for (const auto& r : m.records) adj.at(r.t) = r.pred.adj;
      data::save_edgelist(graph::DynamicNetwork(std::move(adj)), out / (m.method + ".pred.tsv"));
    }
  }
  auto s = open_out(out / "summary.csv");
  write_summary_csv(s, result);
  auto c = open_out(out / "run_config.json");
  c << to_json(config).dump(2) << '\n';
}

}  // namespace hqtlp::cli
