#include "hqtlp/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "hqtlp/errors.hpp"

namespace hqtlp {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " + t.shape_str());
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " +
                     b.shape_str());
  }
}

template <class F>
Tensor map(const Tensor& a, F f) {
  Tensor out = a;
  for (double& x : out.data()) x = f(x);
  return out;
}

template <class F>
Tensor zip(const Tensor& a, const Tensor& b, const char* op, F f) {
  require_same_shape(a, b, op);
  Tensor out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = f(o[k], bd[k]);
  return out;
}

}  // namespace

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : shape_{rows, cols}, data_(rows * cols, fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != product(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + hqtlp::shape_str(shape_));
  }
}

Tensor Tensor::scalar(double value) { return Tensor(1, 1, value); }

Tensor Tensor::identity(std::size_t n) {
  Tensor out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged initializer");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data));
}

std::size_t Tensor::rows() const {
  require_matrix(*this, "rows");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  require_matrix(*this, "cols");
  return shape_[1];
}

double Tensor::item() const {
  if (data_.size() != 1) throw ContractError("item: tensor of shape " + shape_str() + " is not a scalar");
  return data_[0];
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Tensor::shape_str() const { return hqtlp::shape_str(shape_); }

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < shape.size(); ++k) os << (k ? "×" : "") << shape[k];
  os << ']';
  return os.str();
}

void gemm(bool transpose_a, bool transpose_b, const Tensor& a, const Tensor& b, Tensor& c,
          bool accumulate) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = transpose_a ? a.cols() : a.rows();
  const std::size_t k = transpose_a ? a.rows() : a.cols();
  const std::size_t kb = transpose_b ? b.cols() : b.rows();
  const std::size_t n = transpose_b ? b.rows() : b.cols();
  if (k != kb) {
    throw ShapeError("matmul: inner dimensions disagree for " + a.shape_str() +
                     (transpose_a ? "ᵀ" : "") + " and " + b.shape_str() + (transpose_b ? "ᵀ" : ""));
  }
  if (c.rank() != 2 || c.rows() != m || c.cols() != n) {
    throw ShapeError("matmul: output has shape " + c.shape_str() + ", expected [" +
                     std::to_string(m) + "×" + std::to_string(n) + "]");
  }
  if (!accumulate) c.fill(0.0);

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> ea(a.data().data(), a.rows(), a.cols());
  const Eigen::Map<const RowMajor> eb(b.data().data(), b.rows(), b.cols());
  Eigen::Map<RowMajor> ec(c.data().data(), m, n);
  if (!transpose_a && !transpose_b) {
    ec.noalias() += ea * eb;
  } else if (transpose_a && !transpose_b) {
    ec.noalias() += ea.transpose() * eb;
  } else if (!transpose_a && transpose_b) {
    ec.noalias() += ea * eb.transpose();
  } else {
    ec.noalias() += ea.transpose() * eb.transpose();
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree for " + a.shape_str() + " and " +
                     b.shape_str());
  }
  Tensor c(a.rows(), b.cols());
  gemm(false, false, a, b, c, true);
  return c;
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return zip(a, b, "add", [](double x, double y) { return x + y; });
}
Tensor sub(const Tensor& a, const Tensor& b) {
  return zip(a, b, "sub", [](double x, double y) { return x - y; });
}
Tensor mul(const Tensor& a, const Tensor& b) {
  return zip(a, b, "mul", [](double x, double y) { return x * y; });
}
Tensor scale(const Tensor& a, double s) {
  return map(a, [s](double x) { return s * x; });
}
Tensor sigmoid(const Tensor& a) {
  return map(a, [](double x) { return sigmoid(x); });
}
Tensor tanh(const Tensor& a) {
  return map(a, [](double x) { return std::tanh(x); });
}
Tensor relu(const Tensor& a) {
  return map(a, [](double x) { return x > 0.0 ? x : 0.0; });
}
Tensor log(const Tensor& a) {
  for (double x : a.data()) {
    if (!(x > 0.0)) throw DomainError("log: non-positive entry " + std::to_string(x));
  }
  return map(a, [](double x) { return std::log(x); });
}

double sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  return s;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

void axpy(double s, const Tensor& b, Tensor& a) {
  require_same_shape(a, b, "axpy");
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < ad.size(); ++k) ad[k] += s * bd[k];
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace hqtlp
