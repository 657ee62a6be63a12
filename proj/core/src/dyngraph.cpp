#include "hqtlp/dyngraph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp::graph {

void validate_adjacency(const Tensor& adj) {
  if (adj.rank() != 2 || adj.rows() != adj.cols()) {
    throw ValidationError("adjacency must be square, got " + adj.shape_str());
  }
  const std::size_t n = adj.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (adj(i, i) != 0.0) throw ValidationError("nonzero diagonal at node " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double w = adj(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("invalid weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (w != adj(j, i)) {
        throw ValidationError("asymmetric entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

DynamicNetwork::DynamicNetwork(std::vector<Tensor> adjacency) {
  snapshots_.reserve(adjacency.size());
  for (std::size_t t = 0; t < adjacency.size(); ++t) {
    validate_adjacency(adjacency[t]);
    if (t == 0) {
      nodes_ = adjacency[t].rows();
    } else if (adjacency[t].rows() != nodes_) {
      throw ValidationError("snapshot " + std::to_string(t) + " has " +
                            std::to_string(adjacency[t].rows()) + " nodes, expected " +
                            std::to_string(nodes_));
    }
    snapshots_.push_back(Snapshot{std::move(adjacency[t]), t});
  }
}

double DynamicNetwork::max_weight(std::size_t end) const {
  double m = 0.0;
  for (std::size_t t = 0; t < std::min(end, steps()); ++t) {
    for (double w : snapshots_[t].adj.data()) m = std::max(m, w);
  }
  return m;
}

bool operator==(const Snapshot& a, const Snapshot& b) { return a.t == b.t && a.adj == b.adj; }

bool operator==(const DynamicNetwork& a, const DynamicNetwork& b) {
  return a.nodes_ == b.nodes_ && a.snapshots_ == b.snapshots_;
}

ScaledNetwork scale_weights(const DynamicNetwork& net, std::size_t train_steps) {
  const double w_max = net.max_weight(train_steps);
  if (!(w_max > 0.0)) throw ConfigError("training portion contains no edges; cannot scale weights");

  ScaledNetwork out;
  out.w_max = w_max;
  out.train_steps = std::min(train_steps, net.steps());
  std::vector<Tensor> scaled;
  scaled.reserve(net.steps());
  for (const Snapshot& s : net.snapshots()) {
    Tensor a = s.adj;
    for (double& w : a.data()) {
      w /= w_max;
      if (w > 1.0) {
        w = 1.0;
        ++out.clamped;
      }
    }
    scaled.push_back(std::move(a));
  }
  out.net = DynamicNetwork(std::move(scaled));
  return out;
}

Tensor unscale(const Tensor& scaled, double w_max) { return hqtlp::scale(scaled, w_max); }

std::vector<Window> make_windows(const DynamicNetwork& net, std::size_t length) {
  if (length == 0) throw ConfigError("window length must be at least 1");
  if (net.steps() <= length) {
    throw ConfigError("need more than " + std::to_string(length) + " snapshots for windows of length " +
                      std::to_string(length) + ", got " + std::to_string(net.steps()));
  }
  std::vector<Window> out;
  out.reserve(net.steps() - length);
  for (std::size_t target = length; target < net.steps(); ++target) {
    out.push_back(window_for_target(net, target, length));
  }
  return out;
}

Window window_for_target(const DynamicNetwork& net, std::size_t target, std::size_t length) {
  if (length == 0 || target < length || target >= net.steps()) {
    throw ConfigError("no window of length " + std::to_string(length) + " ends before step " +
                      std::to_string(target));
  }
  return Window{net.snapshots().subspan(target - length, length), &net[target]};
}

Tensor gcn_normalize(const Tensor& adj) {
  const std::size_t n = adj.rows();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < n; ++j) d += adj(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  Tensor out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adj(i, j) + (i == j ? 1.0 : 0.0);
      out(i, j) = a * (inv_sqrt[i] * inv_sqrt[j]);
    }
  }
  return out;
}

Tensor symmetrize_and_clean(const Tensor& raw) {
  const std::size_t n = raw.rows();
  Tensor out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = std::max(0.0, 0.5 * (raw(i, j) + raw(j, i)));
      out(i, j) = w;
      out(j, i) = w;
    }
  }
  return out;
}

std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

std::vector<std::size_t> upper_flat_indices(std::size_t n) {
  std::vector<std::size_t> idx;
  idx.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) idx.push_back(i * n + j);
  return idx;
}

Tensor upper_triangle(const Tensor& adj) {
  const std::size_t n = adj.rows();
  Tensor out(1, pair_count(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out[k++] = adj(i, j);
  return out;
}

Tensor from_upper_triangle(const Tensor& upper, std::size_t n) {
  if (upper.size() != pair_count(n)) {
    throw ShapeError("from_upper_triangle: " + std::to_string(upper.size()) +
                     " entries do not match n=" + std::to_string(n));
  }
  Tensor out(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out(i, j) = upper[k];
      out(j, i) = upper[k];
      ++k;
    }
  }
  return out;
}

}  // namespace hqtlp::graph
