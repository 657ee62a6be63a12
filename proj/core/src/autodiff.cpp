#include "hqtlp/autodiff.hpp"

#include <cmath>
#include <string>

#include "hqtlp/errors.hpp"

namespace hqtlp {

namespace {

Tape& common_tape(std::initializer_list<const Var*> vars) {
  Tape* tape = nullptr;
  for (const Var* v : vars) {
    if (v->tape() == nullptr) throw ContractError("operation on an unbound Var");
    if (tape != nullptr && tape != v->tape()) throw ContractError("operands live on different tapes");
    tape = v->tape();
  }
  return *tape;
}

// Unary entry-wise op whose derivative is expressed through input x and
// output y.
template <class Forward, class Derivative>
Var unary(const Var& a, Forward f, Derivative df) {
  Tape& tape = common_tape({&a});
  Tensor out = a.value();
  for (double& x : out.data()) x = f(x);
  const Var ops[] = {a};
  return tape.record(std::move(out), ops,
                     [a, df](const Tensor& g, const Tensor& y, std::span<Tensor* const> grads) {
                       const Tensor& x = a.value();
                       auto ga = grads[0]->data();
                       for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[k] * df(x[k], y[k]);
                     });
}

}  // namespace

const Tensor& Var::value() const {
  if (tape_ == nullptr) throw ContractError("value() on an unbound Var");
  return tape_->value(index_);
}

bool Var::tracked() const { return tape_ != nullptr && tape_->tracked(index_); }

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), false, std::nullopt, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(Tensor value, ParamId id) {
  nodes_.push_back(Node{std::move(value), true, id, {}, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::span<const Var> operands, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.operands.reserve(operands.size());
  for (const Var& v : operands) {
    if (v.tape() != this) throw ContractError("operand recorded on another tape");
    node.operands.push_back(v.index());
    node.tracked = node.tracked || nodes_[v.index()].tracked;
  }
  if (node.tracked) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

GradientMap Tape::backward(const Var& loss) {
  if (loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
  if (!loss.value().is_scalar()) {
    throw ContractError("backward: loss must be a scalar, got shape " + loss.value().shape_str());
  }
  std::vector<Tensor> grads(nodes_.size());
  grads[loss.index()] = Tensor(loss.value().shape(), 1.0);

  std::vector<Tensor*> operand_grads;
  for (std::size_t i = loss.index() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.tracked || !node.backward || grads[i].empty()) continue;
    operand_grads.assign(node.operands.size(), nullptr);
    for (std::size_t k = 0; k < node.operands.size(); ++k) {
      const std::size_t op = node.operands[k];
      if (!nodes_[op].tracked) continue;
      if (grads[op].empty()) grads[op] = Tensor(nodes_[op].value.shape(), 0.0);
      operand_grads[k] = &grads[op];
    }
    node.backward(grads[i], node.value, operand_grads);
  }

  GradientMap out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    if (!node.param) continue;
    auto [it, inserted] = out.try_emplace(*node.param, node.value.shape(), 0.0);
    if (!grads[i].empty()) axpy(1.0, grads[i], it->second);
  }
  return out;
}

Var matmul(const Var& a, const Var& b) {
  Tape& tape = common_tape({&a, &b});
  Tensor out = hqtlp::matmul(a.value(), b.value());
  const Var ops[] = {a, b};
  return tape.record(std::move(out), ops,
                     [a, b](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       if (grads[0]) gemm(false, true, g, b.value(), *grads[0], true);
                       if (grads[1]) gemm(true, false, a.value(), g, *grads[1], true);
                     });
}

Var add(const Var& a, const Var& b) {
  Tape& tape = common_tape({&a, &b});
  Tensor out = hqtlp::add(a.value(), b.value());
  const Var ops[] = {a, b};
  return tape.record(std::move(out), ops,
                     [](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       if (grads[0]) axpy(1.0, g, *grads[0]);
                       if (grads[1]) axpy(1.0, g, *grads[1]);
                     });
}

Var sub(const Var& a, const Var& b) {
  Tape& tape = common_tape({&a, &b});
  Tensor out = hqtlp::sub(a.value(), b.value());
  const Var ops[] = {a, b};
  return tape.record(std::move(out), ops,
                     [](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       if (grads[0]) axpy(1.0, g, *grads[0]);
                       if (grads[1]) axpy(-1.0, g, *grads[1]);
                     });
}

Var mul(const Var& a, const Var& b) {
  Tape& tape = common_tape({&a, &b});
  Tensor out = hqtlp::mul(a.value(), b.value());
  const Var ops[] = {a, b};
  return tape.record(std::move(out), ops,
                     [a, b](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       const Tensor& av = a.value();
                       const Tensor& bv = b.value();
                       if (grads[0]) {
                         auto ga = grads[0]->data();
                         for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[k] * bv[k];
                       }
                       if (grads[1]) {
                         auto gb = grads[1]->data();
                         for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += g[k] * av[k];
                       }
                     });
}

Var scale(const Var& a, double s) { return affine(a, s, 0.0); }

Var affine(const Var& a, double alpha, double beta) {
  return unary(
      a, [alpha, beta](double x) { return alpha * x + beta; },
      [alpha](double, double) { return alpha; });
}

Var sigmoid(const Var& a) {
  return unary(
      a, [](double x) { return sigmoid(x); }, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(const Var& a) {
  return unary(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var relu(const Var& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var log(const Var& a) {
  for (double x : a.value().data()) {
    if (!(x > 0.0)) throw DomainError("log: non-positive entry " + std::to_string(x));
  }
  return unary(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return softplus(x); }, [](double x, double) { return sigmoid(x); });
}

Var sum(const Var& a) {
  Tape& tape = common_tape({&a});
  const Var ops[] = {a};
  return tape.record(Tensor::scalar(hqtlp::sum(a.value())), ops,
                     [](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       const double s = g.item();
                       for (double& x : grads[0]->data()) x += s;
                     });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw ContractError("mean of an empty tensor");
  return scale(sum(a), 1.0 / n);
}

Var mse(const Var& a, const Var& b) {
  const Var d = sub(a, b);
  return mean(mul(d, d));
}

Var add_row(const Var& a, const Var& bias) {
  Tape& tape = common_tape({&a, &bias});
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  if (bv.rank() != 2 || bv.rows() != 1 || av.rank() != 2 || bv.cols() != av.cols()) {
    throw ShapeError("add_row: cannot broadcast " + bv.shape_str() + " over " + av.shape_str());
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bv[j];
  }
  const Var ops[] = {a, bias};
  return tape.record(std::move(out), ops,
                     [](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       if (grads[0]) axpy(1.0, g, *grads[0]);
                       if (grads[1]) {
                         auto gb = grads[1]->data();
                         for (std::size_t i = 0; i < g.rows(); ++i) {
                           auto r = g.row(i);
                           for (std::size_t j = 0; j < r.size(); ++j) gb[j] += r[j];
                         }
                       }
                     });
}

Var reshape(const Var& a, std::vector<std::size_t> shape) {
  Tape& tape = common_tape({&a});
  Tensor out = a.value().reshaped(std::move(shape));
  const Var ops[] = {a};
  return tape.record(std::move(out), ops,
                     [](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       auto ga = grads[0]->data();
                       for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += g[k];
                     });
}

Var slice_row(const Var& a, std::size_t i) {
  Tape& tape = common_tape({&a});
  const Tensor& av = a.value();
  if (av.rank() != 2 || i >= av.rows()) {
    throw ShapeError("slice_row: row " + std::to_string(i) + " out of range for " + av.shape_str());
  }
  auto src = av.row(i);
  Tensor out({1, av.cols()}, std::vector<double>(src.begin(), src.end()));
  const Var ops[] = {a};
  return tape.record(std::move(out), ops,
                     [i](const Tensor& g, const Tensor&, std::span<Tensor* const> grads) {
                       auto dst = grads[0]->row(i);
                       for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += g[j];
                     });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no operands");
  Tape& tape = common_tape({&parts[0]});
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.tape() != &tape) throw ContractError("operands live on different tapes");
    if (p.value().rank() != 2 || p.value().cols() != cols) {
      throw ShapeError("concat_rows: column mismatch " + p.value().shape_str());
    }
    rows += p.value().rows();
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Var& p : parts) data.insert(data.end(), p.value().data().begin(), p.value().data().end());
  std::vector<std::size_t> sizes;
  sizes.reserve(parts.size());
  for (const Var& p : parts) sizes.push_back(p.value().size());
  return tape.record(Tensor({rows, cols}, std::move(data)), parts,
                     [sizes = std::move(sizes)](const Tensor& g, const Tensor&,
                                                std::span<Tensor* const> grads) {
                       std::size_t offset = 0;
                       for (std::size_t p = 0; p < grads.size(); ++p) {
                         if (grads[p] != nullptr) {
                           auto dst = grads[p]->data();
                           for (std::size_t k = 0; k < sizes[p]; ++k) dst[k] += g[offset + k];
                         }
                         offset += sizes[p];
                       }
                     });
}

Var gather(const Var& a, std::span<const std::size_t> flat_indices) {
  Tape& tape = common_tape({&a});
  const Tensor& av = a.value();
  Tensor out(1, flat_indices.size());
  for (std::size_t k = 0; k < flat_indices.size(); ++k) {
    if (flat_indices[k] >= av.size()) throw ShapeError("gather: index out of range");
    out[k] = av[flat_indices[k]];
  }
  std::vector<std::size_t> idx(flat_indices.begin(), flat_indices.end());
  const Var ops[] = {a};
  return tape.record(std::move(out), ops,
                     [idx = std::move(idx)](const Tensor& g, const Tensor&,
                                            std::span<Tensor* const> grads) {
                       auto ga = grads[0]->data();
                       for (std::size_t k = 0; k < idx.size(); ++k) ga[idx[k]] += g[k];
                     });
}

}  // namespace hqtlp
