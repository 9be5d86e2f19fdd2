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

#include "deltazip/compress/obs.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "deltazip/errors.h"
#include "deltazip/linalg.h"

namespace deltazip::compress {
namespace {

// Pruned pairs in lexicographic order; the first minimum wins ties.
constexpr std::array<std::array<int, 2>, 6> kPrunedPairs = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

}  // namespace

Matrix compute_hessian(const Matrix& x, double damping) {
  if (!(damping >= 0.0)) throw ArgumentError("compute_hessian: damping must be >= 0");
  const std::size_t d = x.rows();
  const std::size_t n = x.cols();
  Matrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double* xi = x.row(i).data();
    for (std::size_t j = 0; j <= i; ++j) {
      const double* xj = x.row(j).data();
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += xi[k] * xj[k];
      h(i, j) = sum;
      h(j, i) = sum;
    }
  }
  double mean_diag = 0.0;
  for (std::size_t i = 0; i < d; ++i) mean_diag += h(i, i);
  mean_diag /= static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) h(i, i) += damping * mean_diag;
  return h;
}

std::array<bool, 4> prune_mask_2of4(std::span<const double, 4> group_w,
                                    std::span<const double, 4> hinv_diag) {
  for (double h : hinv_diag) {
    if (!(h > 0.0)) throw NumericError("prune_mask_2of4: inverse-Hessian diagonal must be > 0");
  }
  double best = 0.0;
  std::size_t best_pair = 0;
  for (std::size_t p = 0; p < kPrunedPairs.size(); ++p) {
    const auto [a, b] = kPrunedPairs[p];
    const double saliency = group_w[a] * group_w[a] / hinv_diag[a] +
                            group_w[b] * group_w[b] / hinv_diag[b];
    if (p == 0 || saliency < best) {
      best = saliency;
      best_pair = p;
    }
  }
  std::array<bool, 4> keep = {true, true, true, true};
  keep[kPrunedPairs[best_pair][0]] = false;
  keep[kPrunedPairs[best_pair][1]] = false;
  return keep;
}

LayerCompression obs_compress_layer(std::string_view name, const Matrix& delta,
                                    const Matrix& hessian, const CompressConfig& cfg) {
  cfg.validate();
  const std::string layer(name);
  const std::size_t rows = delta.rows();
  const std::size_t cols = delta.cols();
  if (hessian.rows() != cols || hessian.cols() != cols) {
    throw ShapeError("layer '" + layer + "': hessian is " + std::to_string(hessian.rows()) + "x" +
                     std::to_string(hessian.cols()) + ", expected " + std::to_string(cols) +
                     "x" + std::to_string(cols));
  }
  const bool sparse = cfg.sparsity == Sparsity::kTwoOfFour;
  if (sparse && cols % 4 != 0) {
    throw ShapeError("layer '" + layer + "': 2:4 sparsity needs cols divisible by 4, got " +
                     std::to_string(cols));
  }

  Matrix u(1, 1);
  try {
    u = inverse_upper_cholesky(hessian);
  } catch (const NumericError& e) {
    throw NumericError("layer '" + layer + "': hessian is not positive definite (" + e.what() +
                       ")");
  }

  const bool raw = cfg.passthrough();
  const std::int32_t qmax = raw ? 0 : qmax_for_bits(cfg.bits);
  const std::size_t group = cfg.group_size;
  const std::size_t gpr = (cols + group - 1) / group;
  const std::size_t block = cfg.block_size;

  Matrix w = delta;
  std::vector<std::uint8_t> keep(rows * cols, 1);
  std::vector<std::int32_t> codes(raw ? 0 : rows * cols, 0);
  std::vector<double> kept_raw(raw ? rows * cols : 0, 0.0);
  std::vector<float> scales(raw ? 0 : rows * gpr, 0.0f);
  Matrix err(rows, std::min(block, cols));
  double proxy_loss = 0.0;

  for (std::size_t b0 = 0; b0 < cols; b0 += block) {
    const std::size_t b1 = std::min(b0 + block, cols);
    std::size_t pending_from = b0;

    // Push errors of finalized columns [k0, k1) onto every column >= b1.
    auto flush = [&](std::size_t k0, std::size_t k1) {
      if (k0 == k1 || b1 == cols) return;
      for (std::size_t r = 0; r < rows; ++r) {
        double* wr = w.row(r).data();
        for (std::size_t k = k0; k < k1; ++k) {
          const double e = err(r, k - b0);
          if (e == 0.0) continue;
          const double* uk = u.row(k).data();
          for (std::size_t j = b1; j < cols; ++j) wr[j] -= e * uk[j];
        }
      }
    };

    for (std::size_t i = b0; i < b1; ++i) {
      if (!raw && i % group == 0) {
        const std::size_t g_end = std::min(i + group, cols);
        if (g_end > b1) {
          flush(pending_from, i);
          pending_from = i;
        }
        for (std::size_t r = 0; r < rows; ++r) {
          double max_abs = 0.0;
          for (std::size_t c = i; c < g_end; ++c) max_abs = std::max(max_abs, std::abs(w(r, c)));
          scales[r * gpr + i / group] = static_cast<float>(max_abs / qmax);
        }
      }

      if (sparse && i % 4 == 0) {
        const std::array<double, 4> hd = {u(i, i) * u(i, i), u(i + 1, i + 1) * u(i + 1, i + 1),
                                          u(i + 2, i + 2) * u(i + 2, i + 2),
                                          u(i + 3, i + 3) * u(i + 3, i + 3)};
        for (std::size_t r = 0; r < rows; ++r) {
          const std::array<double, 4> wg = {w(r, i), w(r, i + 1), w(r, i + 2), w(r, i + 3)};
          const auto mask = prune_mask_2of4(wg, hd);
          for (std::size_t k = 0; k < 4; ++k) keep[r * cols + i + k] = mask[k] ? 1 : 0;
        }
      }

      const double d = u(i, i);
      const double* ui = u.row(i).data();
      for (std::size_t r = 0; r < rows; ++r) {
        double* wr = w.row(r).data();
        const double wv = wr[i];
        double q = 0.0;
        if (keep[r * cols + i]) {
          if (raw) {
            q = wv;
            kept_raw[r * cols + i] = wv;
          } else {
            const double scale = scales[r * gpr + i / group];
            const std::int32_t code = quantize_value(wv, scale, qmax);
            codes[r * cols + i] = code;
            q = dequantize_value(code, scale);
          }
        }
        const double e = (wv - q) / d;
        proxy_loss += e * e;
        err(r, i - b0) = e;
        if (e != 0.0) {
          for (std::size_t j = i + 1; j < b1; ++j) wr[j] -= e * ui[j];
        }
      }
    }
    flush(pending_from, b1);
  }

  LayerDelta out;
  out.name = layer;
  out.rows = static_cast<std::uint32_t>(rows);
  out.cols = static_cast<std::uint32_t>(cols);
  out.bits = cfg.bits;
  out.sparsity = cfg.sparsity;
  out.group_size = static_cast<std::uint32_t>(group);
  out.scales = std::move(scales);
  if (sparse) out.index_stream.assign(out.expected_index_bytes(), 0);

  std::vector<std::int32_t> kept_codes;
  kept_codes.reserve(raw ? 0 : out.kept_count());
  std::size_t group_index = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (sparse && c % 4 == 0) {
        std::uint8_t nibble = 0;
        int slot = 0;
        for (std::size_t k = 0; k < 4; ++k) {
          if (keep[r * cols + c + k]) nibble |= static_cast<std::uint8_t>(k << (2 * slot++));
        }
        out.index_stream[group_index / 2] |=
            static_cast<std::uint8_t>(group_index % 2 == 0 ? nibble : nibble << 4);
        ++group_index;
      }
      if (!keep[r * cols + c]) continue;
      if (raw) {
        push_raw_double(out.packed_values, kept_raw[r * cols + c]);
      } else {
        kept_codes.push_back(codes[r * cols + c]);
      }
    }
  }
  if (!raw) out.packed_values = pack_codes(kept_codes, cfg.bits);

  return LayerCompression{std::move(out), proxy_loss};
}

double reconstruction_loss(const Matrix& delta, const Matrix& approx, const Matrix& x) {
  const Matrix diff = matmul(delta - approx, x);
  const double norm = frobenius_norm(diff);
  return norm * norm;
}

}  // namespace deltazip::compress
