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

#include "deltazip/matrix.h"

namespace deltazip {

// Lower-triangular L with L * L^T == a. Throws NumericError when a is not
// symmetric positive definite (a nonpositive pivot is hit).
Matrix cholesky_lower(const Matrix& a);

// Inverse of a symmetric positive definite matrix via its Cholesky factor.
Matrix spd_inverse(const Matrix& a);

// Upper-triangular U with U^T * U == a^{-1}. Row i of U holds the inverse
// Hessian after columns 0..i-1 have been eliminated, which is what the
// column-by-column OBS update consumes.
Matrix inverse_upper_cholesky(const Matrix& a);

}  // namespace deltazip
