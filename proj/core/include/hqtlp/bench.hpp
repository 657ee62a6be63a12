#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hqtlp/config.hpp"
#include "hqtlp/training.hpp"

namespace hqtlp::cli {

struct MethodResult {
  std::string method;
  std::vector<train::PredictionRecord> records;
  metrics::Averages averages;
  double wall_seconds = 0.0;
};

struct BenchResult {
  std::size_t split_t = 0;  // first test step
  double w_max = 0.0;
  std::vector<MethodResult> methods;
};

// First test step for T snapshots. Throws ConfigError unless
// T > window + test_steps.
std::size_t bench_split(std::size_t steps, std::size_t window, std::size_t test_steps);

// Seed a method trains with: derived from the run seed and the method name.
std::uint64_t method_seed(std::uint64_t seed, const std::string& method);

// One method through the shared split and evaluation path.
std::vector<train::PredictionRecord> run_method(const std::string& method, const train::SequenceData& data,
                                                std::size_t split_t, const RunConfig& config);

using ProgressFn = std::function<void(const std::string& method, const metrics::Averages&, double seconds)>;

/// Every configured method on one shared split. Methods run one after the
/// other unless `parallel` is set.
BenchResult run_bench(const graph::DynamicNetwork& net, const RunConfig& config, bool parallel = false,
                      const ProgressFn& progress = {});

// %.17g
std::string format_double(double x);

void write_method_csv(std::ostream& out, const MethodResult& result);
void write_summary_csv(std::ostream& out, const BenchResult& result);

/// <out>/<method>.csv, <out>/summary.csv and <out>/run_config.json; with
/// `save_predictions` also <out>/<method>.pred.tsv (edge list holding the
/// predicted test steps).
void write_bench(const BenchResult& result, const RunConfig& config, const std::filesystem::path& out,
                 bool save_predictions = false, std::size_t nodes = 0, std::size_t steps = 0);

}  // namespace hqtlp::cli
