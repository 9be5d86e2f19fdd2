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

#include "deltazip/linalg.h"

#include <cmath>
#include <string>

#include "deltazip/errors.h"

namespace deltazip {

Matrix cholesky_lower(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(sum > 0.0) || !std::isfinite(sum)) {
          throw NumericError("cholesky: matrix is not positive definite (pivot " +
                             std::to_string(i) + ")");
        }
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  return l;
}

Matrix spd_inverse(const Matrix& a) {
  const Matrix l = cholesky_lower(a);
  const std::size_t n = l.rows();
  // Invert L by forward substitution, then a^{-1} = L^{-T} L^{-1}.
  Matrix linv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    linv(c, c) = 1.0 / l(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      double sum = 0.0;
      for (std::size_t k = c; k < r; ++k) sum -= l(r, k) * linv(k, c);
      linv(r, c) = sum / l(r, r);
    }
  }
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (std::size_t k = i; k < n; ++k) sum += linv(k, i) * linv(k, j);
      inv(i, j) = sum;
      inv(j, i) = sum;
    }
  }
  return inv;
}

Matrix inverse_upper_cholesky(const Matrix& a) {
  return transpose(cholesky_lower(spd_inverse(a)));
}

}  // namespace deltazip
