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

#include <array>
#include <span>
#include <string_view>

#include "deltazip/compress/config.h"
#include "deltazip/compress/layer_delta.h"
#include "deltazip/matrix.h"

namespace deltazip::compress {

// Calibration activations for one layer input, shaped (input_dim x n_samples).
struct CalibrationSet {
  Matrix samples;

  std::size_t input_dim() const { return samples.rows(); }
  std::size_t n_samples() const { return samples.cols(); }
};

// H = X X^T + damping * mean(diag(X X^T)) * I. A zero X gives H = 0, which
// obs_compress_layer rejects as not positive definite.
Matrix compute_hessian(const Matrix& x, double damping);

// Mask over one group of four weights, true = kept. Exactly two entries are
// kept; the pruned pair minimises sum(w_i^2 / hinv_diag_i). Ties resolve to
// the lexicographically smallest pruned pair, so an all-zero group keeps
// positions 2 and 3. Throws NumericError if any hinv_diag entry is <= 0.
std::array<bool, 4> prune_mask_2of4(std::span<const double, 4> group_w,
                                    std::span<const double, 4> hinv_diag);

struct LayerCompression {
  LayerDelta delta;
  // Greedy OBS loss: sum over finalized weights of (w - q)^2 / U_ii^2, where
  // U is the upper Cholesky factor of H^{-1}.
  double proxy_loss = 0.0;
};

// Calibrated 2:4 pruning + group quantization of one delta matrix.
//
// Columns are finalized left to right. For each column the 2:4 mask of its
// four-column group is chosen when the group is entered, the surviving
// weights are rounded onto their (row, group) grid, and the rounding error is
// pushed onto the not-yet-finalized columns through U, the upper Cholesky
// factor of H^{-1}. Updates to columns outside the current block of
// `block_size` columns are applied lazily at block boundaries. Group scales
// are taken from the up-to-date weights when a quantization group is entered.
//
// hessian must be (delta.cols x delta.cols) and positive definite; damping is
// expected to be already folded in (see compute_hessian). Throws
// NumericError naming the layer otherwise.
LayerCompression obs_compress_layer(std::string_view name, const Matrix& delta,
                                    const Matrix& hessian, const CompressConfig& cfg);

// Layer output error ||(delta - approx) X||_F^2, the quantity the solver targets.
double reconstruction_loss(const Matrix& delta, const Matrix& approx, const Matrix& x);

}  // namespace deltazip::compress
