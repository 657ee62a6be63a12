#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hqtlp {

/// Dense row-major tensor of doubles.
///
/// Almost everything in the library is a matrix (rank 2); vectors are stored
/// as 1×k rows and scalars as 1×1. Other ranks are accepted for storage and
/// serialization but the arithmetic below only handles rank 2.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor identity(std::size_t n);
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t rows() const;
  std::size_t cols() const;
  bool is_scalar() const noexcept { return data_.size() == 1; }
  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols(), cols()}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols(), cols()}; }

  // Value of a single-element tensor.
  double item() const;
  void fill(double value);
  Tensor reshaped(std::vector<std::size_t> shape) const;

  bool all_finite() const noexcept;
  std::string shape_str() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

// ---------------------------------------------------------------------------
// Untracked dense kernels. The tape-recorded versions live in autodiff.hpp.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// c (+)= op(a) * op(b), op = optional transpose. c must already have the
// result shape.
void gemm(bool transpose_a, bool transpose_b, const Tensor& a, const Tensor& b, Tensor& c,
          bool accumulate);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor log(const Tensor& a);

double sum(const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);

// In-place a += s * b.
void axpy(double s, const Tensor& b, Tensor& a);

double sigmoid(double x);
double softplus(double x);

}  // namespace hqtlp
