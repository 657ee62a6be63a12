#include "hqtlp/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "hqtlp/errors.hpp"
#include "hqtlp/random.hpp"

namespace hqtlp::data {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

std::size_t parse_index(std::string_view tok, std::size_t line, const char* what) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected a nonnegative integer ") + what + ", got '" +
                               std::string(tok) + "'");
  }
  return v;
}

double parse_weight(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    throw ParseError(line, "expected a decimal weight, got '" + std::string(tok) + "'");
  }
  return v;
}

bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

}  // namespace

graph::DynamicNetwork parse_edgelist(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  std::size_t steps = 0;
  std::vector<Tensor> adj;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    if (skippable(raw)) continue;
    const auto tok = split_ws(raw);
    if (!have_header) {
      if (tok.size() != 2) throw ParseError(line_no, "header must be 'n T'");
      n = parse_index(tok[0], line_no, "node count");
      steps = parse_index(tok[1], line_no, "step count");
      if (n < 2) throw ValidationError("edge list needs at least 2 nodes");
      if (steps < 1) throw ValidationError("edge list needs at least 1 step");
      adj.assign(steps, Tensor(n, n));
      have_header = true;
      continue;
    }
    if (tok.size() != 4) throw ParseError(line_no, "record must be 't i j w'");
    const std::size_t t = parse_index(tok[0], line_no, "step");
    const std::size_t i = parse_index(tok[1], line_no, "node");
    const std::size_t j = parse_index(tok[2], line_no, "node");
    const double w = parse_weight(tok[3], line_no);
    const std::string where = " (line " + std::to_string(line_no) + ")";
    if (t >= steps) throw ValidationError("step index out of range" + where);
    if (i >= n || j >= n) throw ValidationError("node index out of range" + where);
    if (i >= j) throw ValidationError("record needs i < j" + where);
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("weight must be positive and finite" + where);
    if (!seen.emplace(t, i, j).second) throw ValidationError("duplicate record" + where);
    adj[t](i, j) = w;
    adj[t](j, i) = w;
  }
  if (!have_header) throw ParseError(line_no + 1, "missing 'n T' header");
  return graph::DynamicNetwork(std::move(adj));
}

graph::DynamicNetwork load_edgelist(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_edgelist(in);
}

void write_edgelist(std::ostream& out, const graph::DynamicNetwork& net) {
  out << net.nodes() << ' ' << net.steps() << '\n';
  char buf[64];
  for (const auto& snap : net.snapshots()) {
    const std::size_t n = snap.nodes();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = snap.adj(i, j);
        if (w == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", w);
        out << snap.t << ' ' << i << ' ' << j << ' ' << buf << '\n';
      }
    }
  }
}

void save_edgelist(const graph::DynamicNetwork& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_edgelist(out, net);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

void SynthConfig::validate() const {
  if (nodes < 2) throw ConfigError("synthetic network needs at least 2 nodes");
  if (steps < 1) throw ConfigError("synthetic network needs at least 1 step");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw ConfigError("sparsity must lie in (0, 1]");
  if (!(w_hi > 0.0) || !std::isfinite(w_hi)) throw ConfigError("w_hi must be positive");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob(burst_prob, "burst_prob");
  prob(drift, "drift");
  prob(mean_reversion, "mean_reversion");
  if (!(burst_min >= 1.0 && burst_max >= burst_min)) throw ConfigError("need 1 <= burst_min <= burst_max");
  if (!(volatility >= 0.0)) throw ConfigError("volatility must be nonnegative");
  if (!(level_lo > 0.0 && level_hi >= level_lo && level_hi <= 1.0)) {
    throw ConfigError("need 0 < level_lo <= level_hi <= 1");
  }
}

graph::DynamicNetwork gen_synthetic(const SynthConfig& c) {
  c.validate();
  Rng rng(derive_seed(c.seed, "synthetic"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = c.nodes;
  const auto idx = graph::upper_flat_indices(n);
  const std::size_t m = idx.size();
  const std::size_t active_count =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(c.sparsity * static_cast<double>(m))), 1, m);

  const double log_lo = std::log(c.level_lo * c.w_hi);
  const double log_hi = std::log(c.level_hi * c.w_hi);
  std::vector<double> level(m);
  for (double& x : level) x = std::exp(log_lo + (log_hi - log_lo) * unit(rng));

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  // order[0, active_count) is the support; the rest are inactive.
  std::vector<double> dev(m, 0.0);

  std::vector<Tensor> out;
  out.reserve(c.steps);
  const double keep = 1.0 - c.mean_reversion;
  for (std::size_t t = 0; t < c.steps; ++t) {
    if (t > 0) {
      for (std::size_t a = 0; a < active_count; ++a) {
        if (active_count < m && unit(rng) < c.drift) {
          std::uniform_int_distribution<std::size_t> pick(active_count, m - 1);
          std::swap(order[a], order[pick(rng)]);
          dev[order[a]] = 0.0;
        } else {
          dev[order[a]] = keep * (dev[order[a]] + c.volatility * normal(rng));
        }
      }
    }
    Tensor adj(n, n);
    for (std::size_t a = 0; a < active_count; ++a) {
      const std::size_t p = order[a];
      double burst = 1.0;
      if (c.burst_prob > 0.0 && unit(rng) < c.burst_prob) {
        burst = c.burst_min + (c.burst_max - c.burst_min) * unit(rng);
      }
      const double w = std::min(c.w_hi, level[p] * std::exp(dev[p]) * burst);
      const std::size_t flat = idx[p];
      const std::size_t i = flat / n;
      const std::size_t j = flat % n;
      adj(i, j) = w;
      adj(j, i) = w;
    }
    out.push_back(std::move(adj));
  }
  return graph::DynamicNetwork(std::move(out));
}

SynthConfig preset(std::string_view name) {
  SynthConfig c;
  if (name == "mesh-like") {
    c.nodes = 38;
    c.steps = 1000;
    c.w_hi = 2000.0;
    c.sparsity = 0.25;
  } else if (name == "adhoc-like") {
    c.nodes = 92;
    c.steps = 500;
    c.w_hi = 250.0;
    c.sparsity = 0.05;
    c.drift = 0.03;
  } else if (name == "dcn-like") {
    c.nodes = 128;
    c.steps = 350;
    c.w_hi = 20000.0;
    c.sparsity = 0.1;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected one of mesh-like, adhoc-like, dcn-like)");
  }
  return c;
}

std::vector<std::string> preset_names() { return {"mesh-like", "adhoc-like", "dcn-like"}; }

NetworkSummary summarize(const graph::DynamicNetwork& net) {
  NetworkSummary s;
  s.nodes = net.nodes();
  s.steps = net.steps();
  std::size_t edges = 0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& snap : net.snapshots()) {
    for (std::size_t i = 0; i < s.nodes; ++i) {
      for (std::size_t j = i + 1; j < s.nodes; ++j) {
        const double w = snap.adj(i, j);
        if (w <= 0.0) continue;
        ++edges;
        lo = std::min(lo, w);
        s.w_max = std::max(s.w_max, w);
      }
    }
  }
  const double slots = static_cast<double>(s.steps) * static_cast<double>(graph::pair_count(s.nodes));
  s.sparsity = slots > 0.0 ? static_cast<double>(edges) / slots : 0.0;
  s.w_min = edges > 0 ? lo : 0.0;
  return s;
}

}  // namespace hqtlp::data
