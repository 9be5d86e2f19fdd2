/* Copyright 2026 The DeltaZip Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "deltazip/errors.h"
#include "deltazip/linalg.h"
#include "deltazip/matrix.h"
#include "deltazip/rng.h"
#include "deltazip/weight_stack.h"
#include "oracles.h"

namespace deltazip {
namespace {

TEST(Matrix, RejectsEmptyShapes) {
  EXPECT_THROW(Matrix(0, 3), ShapeError);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>(3)), ShapeError);
}

TEST(Matmul, IdentityLeavesOperandUnchanged) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(matmul(Matrix::identity(2), a), a);
}

TEST(Matmul, Projector) {
  const Matrix p{{1, 0}, {0, 0}};
  const Matrix v{{5}, {7}};
  EXPECT_EQ(matmul(p, v), (Matrix{{5}, {0}}));
}

TEST(Matmul, DimensionMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(3, 4), Matrix(5, 2)), ShapeError);
}

TEST(Matmul, MatchesNaiveLoopOnRandomInputs) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 1 + rng.below(9), k = 1 + rng.below(9), n = 1 + rng.below(9);
    const Matrix a = gaussian_matrix(rng, m, k, 1.0);
    const Matrix b = gaussian_matrix(rng, k, n, 1.0);
    // Both accumulate over k in ascending order, so agreement is exact.
    EXPECT_EQ(matmul(a, b), oracle::naive_matmul(a, b));
  }
}

TEST(Matmul, IdentityIsExactOnRandomInputs) {
  Rng rng(5);
  const Matrix a = gaussian_matrix(rng, 7, 5, 3.0);
  EXPECT_EQ(matmul(Matrix::identity(7), a), a);
  EXPECT_EQ(matmul(a, Matrix::identity(5)), a);
}

TEST(GaussianMatrix, ZeroStddevGivesZeros) {
  Rng rng(1);
  EXPECT_EQ(gaussian_matrix(rng, 3, 4, 0.0), Matrix(3, 4));
}

TEST(GaussianMatrix, SameSeedIsBitIdentical) {
  Rng a(42), b(42);
  EXPECT_EQ(gaussian_matrix(a, 6, 6, 1.0), gaussian_matrix(b, 6, 6, 1.0));
}

TEST(GaussianMatrix, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  EXPECT_NE(gaussian_matrix(a, 6, 6, 1.0), gaussian_matrix(b, 6, 6, 1.0));
}

TEST(GaussianMatrix, NegativeStddevThrows) {
  Rng rng(1);
  EXPECT_THROW(gaussian_matrix(rng, 2, 2, -1.0), ArgumentError);
}

TEST(GaussianMatrix, SampleMomentsAreReasonable) {
  Rng rng(3);
  const Matrix m = gaussian_matrix(rng, 200, 200, 2.0);
  double sum = 0.0, sq = 0.0;
  for (double v : m.data()) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(m.size());
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 4.0, 0.1);
}

TEST(Rng, ExponentialMeanAndBelowRange) {
  Rng rng(9);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) sum += rng.exponential(4.0);
  EXPECT_NEAR(sum / 20000, 0.25, 0.01);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(FrobeniusDistance, Examples) {
  const Matrix a{{3, 0}, {0, 4}};
  EXPECT_DOUBLE_EQ(frobenius_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_distance(a, Matrix(2, 2)), 5.0);
  EXPECT_THROW(frobenius_distance(a, Matrix(2, 3)), ShapeError);
}

TEST(FrobeniusDistance, MatchesLoopOracleAndIsSymmetric) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Matrix a = gaussian_matrix(rng, 5, 7, 1.0);
    const Matrix b = gaussian_matrix(rng, 5, 7, 1.0);
    EXPECT_NEAR(frobenius_distance(a, b), oracle::naive_frobenius_distance(a, b), 1e-12);
    EXPECT_EQ(frobenius_distance(a, b), frobenius_distance(b, a));
    EXPECT_GT(frobenius_distance(a, b), 0.0);
  }
}

TEST(Linalg, CholeskyReconstructs) {
  Rng rng(4);
  const Matrix x = gaussian_matrix(rng, 6, 20, 1.0);
  const Matrix a = matmul(x, transpose(x));
  const Matrix l = cholesky_lower(a);
  EXPECT_LT(oracle::max_abs_diff(matmul(l, transpose(l)), a), 1e-10);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) EXPECT_EQ(l(i, j), 0.0);
  }
}

TEST(Linalg, InverseUpperCholeskyFactorsTheInverse) {
  Rng rng(8);
  const Matrix x = gaussian_matrix(rng, 5, 30, 1.0);
  const Matrix a = matmul(x, transpose(x));
  const Matrix u = inverse_upper_cholesky(a);
  const Matrix prod = matmul(matmul(transpose(u), u), a);
  EXPECT_LT(oracle::max_abs_diff(prod, Matrix::identity(5)), 1e-9);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(u(i, j), 0.0);
  }
}

TEST(Linalg, NonPositiveDefiniteThrows) {
  EXPECT_THROW(cholesky_lower(Matrix(3, 3)), NumericError);
  EXPECT_THROW(cholesky_lower(Matrix{{1, 2}, {2, 1}}), NumericError);
}

WeightStack small_stack(Rng& rng) {
  WeightStack s;
  s.add_layer("up", gaussian_matrix(rng, 8, 4, 1.0), ParallelAxis::kColumn);
  s.add_layer("down", gaussian_matrix(rng, 4, 8, 1.0), ParallelAxis::kRow);
  return s;
}

TEST(WeightStack, EnforcesUniqueNamesAndChaining) {
  WeightStack s;
  s.add_layer("a", Matrix(4, 3));
  EXPECT_THROW(s.add_layer("a", Matrix(2, 4)), ArgumentError);
  EXPECT_THROW(s.add_layer("b", Matrix(2, 5)), ShapeError);
  s.add_layer("b", Matrix(2, 4));
  EXPECT_EQ(s.input_dim(), 3u);
  EXPECT_EQ(s.output_dim(), 2u);
}

TEST(WeightStack, ForwardPasses) {
  Rng rng(2);
  const WeightStack s = small_stack(rng);
  const Matrix x = gaussian_matrix(rng, 4, 3, 1.0);
  EXPECT_EQ(linear_forward(s, x), matmul(s[1].weight, matmul(s[0].weight, x)));
  EXPECT_EQ(activated_forward(s, x), matmul(s[1].weight, tanh(matmul(s[0].weight, x))));
}

// Values representable in f32 survive the DZWT round trip exactly.
WeightStack f32_exact_stack() {
  WeightStack s;
  s.add_layer("wq", Matrix{{0.5, -1.25, 3.0}, {0.0, 2.0, -0.75}}, ParallelAxis::kColumn);
  s.add_layer("wo", Matrix{{1.0, 0.25}, {-4.0, 8.5}}, ParallelAxis::kRow);
  return s;
}

TEST(Dzwt, RoundTripsF32ExactValues) {
  const WeightStack s = f32_exact_stack();
  const auto bytes = encode_weight_stack(s);
  const WeightStack back = decode_weight_stack(bytes);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].name, s[i].name);
    EXPECT_EQ(back[i].weight, s[i].weight);
  }
}

TEST(Dzwt, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "deltazip_core_test.dzwt";
  write_weight_stack(f32_exact_stack(), path);
  const WeightStack back = read_weight_stack(path);
  EXPECT_EQ(back[1].weight, f32_exact_stack()[1].weight);
  std::filesystem::remove(path);
}

TEST(Dzwt, BadMagicAndEveryTruncationAreFormatErrors) {
  auto bytes = encode_weight_stack(f32_exact_stack());
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_weight_stack(bad), FormatError);
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    std::span<const std::uint8_t> prefix(bytes.data(), n);
    EXPECT_THROW(decode_weight_stack(prefix), FormatError) << "prefix " << n;
  }
  bytes.push_back(0);
  EXPECT_THROW(decode_weight_stack(bytes), FormatError);
}

TEST(Dzwt, MissingFileIsInputError) {
  EXPECT_THROW(read_weight_stack("/nonexistent/model.dzwt"), InputError);
}

}  // namespace
}  // namespace deltazip
