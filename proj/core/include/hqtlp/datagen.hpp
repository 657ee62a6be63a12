#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hqtlp/dyngraph.hpp"

namespace hqtlp::data {

// Edge-list text format:
//   n T
//   t i j w      (one per edge, 0 <= i < j < n, 0 <= t < T, w > 0)
// Lines starting with '#' and blank lines are skipped.

graph::DynamicNetwork parse_edgelist(std::istream& in);
graph::DynamicNetwork load_edgelist(const std::filesystem::path& path);

// Canonical order (t, i, j), weights as %.17g.
void write_edgelist(std::ostream& out, const graph::DynamicNetwork& net);
void save_edgelist(const graph::DynamicNetwork& net, const std::filesystem::path& path);

/// Synthetic sparse network with a wide weight range.
///
/// A fixed number of pairs, round(sparsity · n(n−1)/2), is active at any
/// time. Each step every active edge leaves the support with probability
/// `drift` and a random inactive pair takes its place. An edge weight is
///   w = min(w_hi, μ · exp(d) · burst)
/// where μ is a per-pair level drawn log-uniformly in
/// [level_lo · w_hi, level_hi · w_hi], d follows
///   d' = (1 − mean_reversion) · (d + volatility · ε),  ε ~ N(0, 1)
/// and burst is 1, or with probability burst_prob a factor uniform in
/// [burst_min, burst_max] for that step only.
struct SynthConfig {
  std::size_t nodes = 32;
  std::size_t steps = 200;
  double sparsity = 0.15;
  double w_hi = 1000.0;
  double burst_prob = 0.02;
  double burst_min = 2.0;
  double burst_max = 8.0;
  double drift = 0.01;
  double mean_reversion = 0.1;
  double volatility = 0.3;
  double level_lo = 1e-3;
  double level_hi = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

graph::DynamicNetwork gen_synthetic(const SynthConfig& config);

// Named shapes: "mesh-like" (38 nodes, 1000 steps, w_hi 2000), "adhoc-like"
// (92, 500, 250) and "dcn-like" (128, 350, 20000). Throws ConfigError for
// other names.
SynthConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct NetworkSummary {
  std::size_t nodes = 0;
  std::size_t steps = 0;
  double sparsity = 0.0;  // fraction of (step, pair) slots holding an edge
  double w_min = 0.0;     // smallest positive weight (0 without edges)
  double w_max = 0.0;
};

NetworkSummary summarize(const graph::DynamicNetwork& net);

}  // namespace hqtlp::data
