#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hqtlp/errors.hpp"
#include "hqtlp/tensor.hpp"

using namespace hqtlp;
using testing_support::random_tensor;

TEST(Tensor, ShapeAndDataLengthAgree) {
  Tensor t({2, 3, 4}, 1.5);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW((void)t.rows(), ShapeError);
}

TEST(Tensor, IdentityTimesMatrixIsMatrix) {
  const Tensor m = Tensor::from_rows({{1.5, -2.0}, {0.25, 7.0}});
  EXPECT_EQ(matmul(Tensor::identity(2), m), m);
}

TEST(Tensor, MatmulHandComputed) {
  const Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
  const Tensor b = Tensor::from_rows({{5}, {6}});
  EXPECT_EQ(matmul(a, b), Tensor::from_rows({{17}, {39}}));
}

TEST(Tensor, MatmulShapeErrorNamesBothShapes) {
  const Tensor a(2, 3);
  const Tensor b(2, 2);
  try {
    (void)matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2×3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2×2"), std::string::npos) << msg;
  }
}

TEST(Tensor, GemmTransposeVariantsMatchExplicitTranspose) {
  std::mt19937_64 rng(3);
  const Tensor a = random_tensor(4, 3, rng);
  const Tensor b = random_tensor(4, 5, rng);
  const Tensor c = random_tensor(4, 3, rng);
  Tensor out(3, 5);
  gemm(true, false, a, b, out, false);
  EXPECT_LT(max_abs_diff(out, matmul(transpose(a), b)), 1e-14);
  Tensor out2(4, 4);
  gemm(false, true, a, c, out2, false);
  EXPECT_LT(max_abs_diff(out2, matmul(a, transpose(c))), 1e-14);
  const Tensor d = random_tensor(5, 4, rng);
  Tensor out3(3, 5);
  gemm(true, true, a, d, out3, false);
  EXPECT_LT(max_abs_diff(out3, matmul(transpose(a), transpose(d))), 1e-14);
  // accumulate adds on top
  Tensor acc = out;
  gemm(true, false, a, b, acc, true);
  EXPECT_LT(max_abs_diff(acc, scale(out, 2.0)), 1e-14);
}

TEST(Tensor, MatmulAssociativityOnRandomTriples) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor a = random_tensor(4, 4, rng);
    const Tensor b = random_tensor(4, 4, rng);
    const Tensor c = random_tensor(4, 4, rng);
    EXPECT_LT(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))), 1e-10);
  }
}

TEST(Tensor, ElementwiseBasics) {
  EXPECT_DOUBLE_EQ(sigmoid(Tensor::scalar(0.0)).item(), 0.5);
  EXPECT_DOUBLE_EQ(hqtlp::tanh(Tensor::scalar(0.0)).item(), 0.0);
  EXPECT_EQ(relu(Tensor::from_rows({{-1, 2}})), Tensor::from_rows({{0, 2}}));
  EXPECT_THROW((void)hqtlp::log(Tensor::scalar(0.0)), DomainError);
  EXPECT_THROW((void)hqtlp::log(Tensor::from_rows({{1, -2}})), DomainError);
  EXPECT_DOUBLE_EQ(hqtlp::log(Tensor::scalar(std::exp(2.0))).item(), 2.0);
  EXPECT_THROW((void)add(Tensor(2, 2), Tensor(2, 3)), ShapeError);
}

TEST(Tensor, ScalarHelpersAreStableAtExtremes) {
  EXPECT_DOUBLE_EQ(sigmoid(-800.0), 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
  EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isfinite(softplus(-800.0)));
}

TEST(Tensor, OperationsKeepFiniteInputsFinite) {
  std::mt19937_64 rng(5);
  const Tensor a = random_tensor(3, 3, rng, -50.0, 50.0);
  for (const Tensor& t : {sigmoid(a), hqtlp::tanh(a), relu(a), scale(a, 3.0), mul(a, a)}) {
    EXPECT_TRUE(t.all_finite());
  }
}
