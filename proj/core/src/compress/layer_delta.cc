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

#include "deltazip/compress/layer_delta.h"

#include <cmath>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::compress {

std::size_t LayerDelta::expected_words() const {
  if (bits == 16) return 2 * kept_count();
  const std::size_t per_word = codes_per_word(bits);
  return (kept_count() + per_word - 1) / per_word;
}

std::size_t LayerDelta::expected_index_bytes() const {
  if (sparsity != Sparsity::kTwoOfFour) return 0;
  const std::size_t groups = std::size_t{rows} * (cols / 4);
  return (groups * 4 + 7) / 8;
}

std::size_t LayerDelta::expected_scales() const {
  return bits == 16 ? 0 : std::size_t{rows} * groups_per_row();
}

void LayerDelta::validate() const {
  auto fail = [this](const std::string& why) {
    throw EncodingError("layer '" + name + "': " + why);
  };
  if (rows == 0 || cols == 0) fail("empty shape");
  if (bits != 2 && bits != 3 && bits != 4 && bits != 8 && bits != 16) {
    fail("unsupported bit width " + std::to_string(bits));
  }
  if (group_size == 0) fail("group_size is 0");
  if (sparsity == Sparsity::kTwoOfFour && cols % 4 != 0) {
    fail("2:4 sparsity needs a column count divisible by 4");
  }
  if (packed_values.size() != expected_words()) {
    fail("packed_values holds " + std::to_string(packed_values.size()) + " words, expected " +
         std::to_string(expected_words()));
  }
  if (index_stream.size() != expected_index_bytes()) {
    fail("index_stream holds " + std::to_string(index_stream.size()) + " bytes, expected " +
         std::to_string(expected_index_bytes()));
  }
  if (scales.size() != expected_scales()) {
    fail("scales holds " + std::to_string(scales.size()) + " entries, expected " +
         std::to_string(expected_scales()));
  }
  for (float s : scales) {
    if (!(s >= 0.0f) || !std::isfinite(s)) fail("negative or non-finite scale");
  }
  const std::size_t groups = std::size_t{rows} * (sparsity == Sparsity::kTwoOfFour ? cols / 4 : 0);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::uint8_t byte = index_stream[g / 2];
    const std::uint8_t nibble = (g % 2 == 0) ? (byte & 0x0F) : (byte >> 4);
    if ((nibble & 0x3) >= ((nibble >> 2) & 0x3)) {
      fail("2:4 group " + std::to_string(g) + " does not keep two distinct ascending positions");
    }
  }
  if (groups % 2 == 1 && (index_stream.back() >> 4) != 0) fail("nonzero index padding");
  if (bits != 16) {
    // Every stored field must decode onto the grid.
    (void)unpack_codes(packed_values, bits, kept_count());
  }
}

Matrix dequantize(const LayerDelta& d) {
  Matrix out(d.rows, d.cols);
  for_each_entry(d, [&](std::size_t r, std::size_t c, double v) { out(r, c) = v; });
  return out;
}

Matrix apply_delta(const LayerDelta& d, const Matrix& x) {
  if (x.rows() != d.cols) {
    throw ShapeError("apply_delta: layer '" + d.name + "' expects " + std::to_string(d.cols) +
                     " input rows, got " + std::to_string(x.rows()));
  }
  Matrix y(d.rows, x.cols());
  const std::size_t n = x.cols();
  for_each_entry(d, [&](std::size_t r, std::size_t c, double v) {
    double* out = y.row(r).data();
    const double* in = x.row(c).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += v * in[j];
  });
  return y;
}

std::size_t payload_bytes(const LayerDelta& d) {
  return 4 * d.packed_values.size() + d.index_stream.size() + 4 * d.scales.size();
}

}  // namespace deltazip::compress
