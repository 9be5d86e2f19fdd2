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

#include "deltazip/matrix.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltazip/errors.h"

namespace deltazip {
namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) +
                     " vs " + shape_str(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be >= 1, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be >= 1, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw ShapeError("empty matrix literal");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions differ " + shape_str(a) +
                     " * " + shape_str(b));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      const double* brow = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  }
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix c = a;
  auto out = c.data();
  auto in = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "subtract");
  Matrix c = a;
  auto out = c.data();
  auto in = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= in[i];
  return c;
}

double frobenius_norm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.data()) sum += v * v;
  return std::sqrt(sum);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  double sum = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                       double stddev) {
  if (!(stddev >= 0.0)) throw ArgumentError("gaussian_matrix: stddev must be >= 0");
  Matrix m(rows, cols);
  for (double& v : m.data()) v = stddev * rng.normal();
  return m;
}

Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t end) {
  if (begin >= end || end > m.rows()) {
    throw ShapeError("slice_rows: bad range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") of " + shape_str(m));
  }
  Matrix s(end - begin, m.cols());
  for (std::size_t r = begin; r < end; ++r) {
    auto src = m.row(r);
    std::copy(src.begin(), src.end(), s.row(r - begin).begin());
  }
  return s;
}

Matrix slice_cols(const Matrix& m, std::size_t begin, std::size_t end) {
  if (begin >= end || end > m.cols()) {
    throw ShapeError("slice_cols: bad range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") of " + shape_str(m));
  }
  Matrix s(m.rows(), end - begin);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = begin; c < end; ++c) s(r, c - begin) = m(r, c);
  }
  return s;
}

Matrix hconcat(std::span<const Matrix> blocks) {
  if (blocks.empty()) throw ShapeError("hconcat: no blocks");
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    if (b.rows() != blocks[0].rows()) throw ShapeError("hconcat: row counts differ");
    cols += b.cols();
  }
  Matrix out(blocks[0].rows(), cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t r = 0; r < b.rows(); ++r) {
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, offset + c) = b(r, c);
    }
    offset += b.cols();
  }
  return out;
}

Matrix vconcat(std::span<const Matrix> blocks) {
  if (blocks.empty()) throw ShapeError("vconcat: no blocks");
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != blocks[0].cols()) throw ShapeError("vconcat: column counts differ");
    rows += b.rows();
  }
  std::vector<double> data;
  data.reserve(rows * blocks[0].cols());
  for (const auto& b : blocks) data.insert(data.end(), b.data().begin(), b.data().end());
  return Matrix(rows, blocks[0].cols(), std::move(data));
}

Matrix tanh(const Matrix& m) {
  Matrix out = m;
  for (double& v : out.data()) v = std::tanh(v);
  return out;
}

}  // namespace deltazip
