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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "deltazip/rng.h"

namespace deltazip {

// Dense row-major matrix of doubles. Always at least 1x1.
class Matrix {
 public:
  // Zero-filled. Throws ShapeError if either dimension is 0.
  Matrix(std::size_t rows, std::size_t cols);
  // Takes ownership of row-major data; data.size() must equal rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  // Builds from nested rows; every row must have the same length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// a * b. Each output element accumulates over the shared dimension in
// ascending order, independent of how many columns b has.
Matrix matmul(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double frobenius_distance(const Matrix& a, const Matrix& b);

// I.i.d. N(0, stddev^2) entries drawn from rng in row-major order.
Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double stddev);

Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t end);
Matrix slice_cols(const Matrix& m, std::size_t begin, std::size_t end);
Matrix hconcat(std::span<const Matrix> blocks);
Matrix vconcat(std::span<const Matrix> blocks);

// Elementwise tanh, the placeholder nonlinearity between linear layers.
Matrix tanh(const Matrix& m);

}  // namespace deltazip
