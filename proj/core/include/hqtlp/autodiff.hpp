#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hqtlp/tensor.hpp"

namespace hqtlp {

using ParamId = std::size_t;
using GradientMap = std::map<ParamId, Tensor>;

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  bool tracked() const;
  std::size_t index() const noexcept { return index_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

/// Define-by-run reverse-mode differentiation record.
///
/// Nodes are appended in evaluation order, so operands always precede their
/// results and a single reverse sweep visits each node once. A node is
/// "tracked" when it is a parameter or depends on one; untracked nodes carry
/// no backward closure. One tape belongs to one thread.
class Tape {
 public:
  // Receives dL/d(out) and the forward output, accumulates into operand
  // gradients. operand_grads[k] is null when operand k is untracked.
  using BackwardFn = std::function<void(const Tensor& grad_out, const Tensor& out,
                                        std::span<Tensor* const> operand_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var param(Tensor value, ParamId id);

  // Appends the result of an operation. The closure is dropped when no
  // operand is tracked.
  Var record(Tensor value, std::span<const Var> operands, BackwardFn backward);

  /// Gradients of the scalar `loss` with respect to every parameter recorded
  /// on this tape. Parameters the loss does not depend on get a zero tensor.
  /// Does not modify the tape, so repeated calls return identical maps.
  GradientMap backward(const Var& loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Tensor& value(std::size_t index) const { return nodes_[index].value; }
  bool tracked(std::size_t index) const { return nodes_[index].tracked; }

 private:
  struct Node {
    Tensor value;
    bool tracked = false;
    std::optional<ParamId> param;
    std::vector<std::size_t> operands;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

// Tape-recorded operations. Operands must live on the same tape.
Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
// alpha * a + beta, entry-wise.
Var affine(const Var& a, double alpha, double beta);
Var sigmoid(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var log(const Var& a);
// log(1 + exp(a)), computed without overflow.
Var softplus(const Var& a);
Var sum(const Var& a);
Var mean(const Var& a);
// Mean of squared differences.
Var mse(const Var& a, const Var& b);
// a (r×c) plus the 1×c row `bias` added to every row.
Var add_row(const Var& a, const Var& bias);
Var reshape(const Var& a, std::vector<std::size_t> shape);
// Row i of a matrix as a 1×c tensor.
Var slice_row(const Var& a, std::size_t i);
// Stacks matrices with equal column counts vertically.
Var concat_rows(std::span<const Var> parts);
// Picks flat (row-major) entries into a 1×k row.
Var gather(const Var& a, std::span<const std::size_t> flat_indices);

}  // namespace hqtlp
