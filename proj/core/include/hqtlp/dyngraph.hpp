#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hqtlp/tensor.hpp"

namespace hqtlp::graph {

/// One time step of a weighted undirected network.
///
/// `adj` is n×n, symmetric, zero on the diagonal, nonnegative; an entry of 0
/// means the pair has no edge.
struct Snapshot {
  Tensor adj;
  std::size_t t = 0;

  std::size_t nodes() const { return adj.rows(); }
};

// Throws ValidationError unless `adj` is a valid snapshot adjacency.
void validate_adjacency(const Tensor& adj);

/// Ordered snapshots over one fixed node set, indexed t = 0..T-1.
class DynamicNetwork {
 public:
  DynamicNetwork() = default;
  // Validates every matrix and assigns consecutive time indices.
  explicit DynamicNetwork(std::vector<Tensor> adjacency);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t steps() const noexcept { return snapshots_.size(); }
  const Snapshot& operator[](std::size_t t) const { return snapshots_[t]; }
  std::span<const Snapshot> snapshots() const noexcept { return snapshots_; }

  // Largest weight among steps [0, end).
  double max_weight(std::size_t end) const;
  double max_weight() const { return max_weight(steps()); }

  friend bool operator==(const DynamicNetwork&, const DynamicNetwork&);

 private:
  std::size_t nodes_ = 0;
  std::vector<Snapshot> snapshots_;
};

bool operator==(const Snapshot& a, const Snapshot& b);

// A network expressed in units of the training-portion maximum weight.
struct ScaledNetwork {
  DynamicNetwork net;
  double w_max = 1.0;
  std::size_t train_steps = 0;
  // Entries beyond the training portion that exceeded w_max and were clipped.
  std::size_t clamped = 0;
};

/// Divides every weight by the max over steps [0, train_steps). Later steps
/// may exceed 1 and are clamped to 1 (`clamped` counts matrix entries, so two per pair).
/// Throws ConfigError when the training portion has no edge.
ScaledNetwork scale_weights(const DynamicNetwork& net, std::size_t train_steps);

Tensor unscale(const Tensor& scaled, double w_max);

/// L consecutive inputs and the snapshot right after them.
struct Window {
  std::span<const Snapshot> inputs;
  const Snapshot* target = nullptr;

  std::size_t length() const noexcept { return inputs.size(); }
  std::size_t target_t() const { return target->t; }
};

// All T-L windows in order; window k has inputs k..k+L-1 and target k+L.
// Throws ConfigError when T <= L or L == 0.
std::vector<Window> make_windows(const DynamicNetwork& net, std::size_t length);

// The window whose target is step `target` (inputs target-L .. target-1).
Window window_for_target(const DynamicNetwork& net, std::size_t target, std::size_t length);

// D^{-1/2} (A + I) D^{-1/2}, D the row sums of A + I.
Tensor gcn_normalize(const Tensor& adj);

// (raw + rawᵀ)/2 with the diagonal zeroed and negatives clamped to 0.
Tensor symmetrize_and_clean(const Tensor& raw);

// Unordered pairs i < j, enumerated row-major: (0,1), (0,2), ..., (1,2), ...
std::size_t pair_count(std::size_t n);
std::vector<std::size_t> upper_flat_indices(std::size_t n);
Tensor upper_triangle(const Tensor& adj);
// Inverse of upper_triangle: mirrors a 1×n(n-1)/2 row into a symmetric
// zero-diagonal n×n matrix.
Tensor from_upper_triangle(const Tensor& upper, std::size_t n);

}  // namespace hqtlp::graph
