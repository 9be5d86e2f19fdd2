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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deltazip/compress/config.h"
#include "deltazip/compress/quantizer.h"
#include "deltazip/matrix.h"

namespace deltazip::compress {

// One compressed layer delta in its at-rest layout.
//
// Values are enumerated row-major. With 2:4 sparsity each row is cut into
// groups of four columns; two positions are kept per group and recorded as
// a pair of 2-bit in-group offsets (ascending), packed four bits per group
// into index_stream, least-significant first. packed_values then holds only
// the kept values in the same order. Dense layers keep every value and have
// an empty index_stream.
//
// For bits in {2,3,4,8} packed_values holds offset-encoded codes (see
// pack_codes) and scales holds one f32 scale per (row, column group),
// row-major. bits == 16 is the exact pass-through: every kept value is an
// IEEE binary64 split over two words (low word first) and scales is empty.
struct LayerDelta {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  int bits = 4;
  Sparsity sparsity = Sparsity::kTwoOfFour;
  std::uint32_t group_size = 128;
  std::vector<std::uint32_t> packed_values;
  std::vector<std::uint8_t> index_stream;
  std::vector<float> scales;

  std::size_t kept_per_row() const {
    return sparsity == Sparsity::kTwoOfFour ? cols / 2 : cols;
  }
  std::size_t kept_count() const { return std::size_t{rows} * kept_per_row(); }
  std::size_t groups_per_row() const { return (cols + group_size - 1) / group_size; }

  std::size_t expected_words() const;
  std::size_t expected_index_bytes() const;
  std::size_t expected_scales() const;

  // Structural consistency of every stream; throws EncodingError.
  void validate() const;

  bool operator==(const LayerDelta&) const = default;
};

// Walks the stored nonzero-pattern row by row, columns ascending, calling
// fn(row, col, value) with the dequantized value of every kept position.
template <typename Fn>
void for_each_entry(const LayerDelta& d, Fn&& fn);

// Dense reconstruction of the compressed delta.
Matrix dequantize(const LayerDelta& d);

// Delta * x evaluated straight from the packed form; x is (cols x n).
// Per output element the products are accumulated over columns in
// ascending order.
Matrix apply_delta(const LayerDelta& d, const Matrix& x);

// Bytes of each stream as laid out on disk.
std::size_t payload_bytes(const LayerDelta& d);

// Raw binary64 storage used by the 16-bit pass-through.
inline void push_raw_double(std::vector<std::uint32_t>& words, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  words.push_back(static_cast<std::uint32_t>(bits));
  words.push_back(static_cast<std::uint32_t>(bits >> 32));
}

inline double read_raw_double(const std::vector<std::uint32_t>& words, std::size_t i) {
  const std::uint64_t bits =
      std::uint64_t{words[2 * i]} | (std::uint64_t{words[2 * i + 1]} << 32);
  return std::bit_cast<double>(bits);
}

template <typename Fn>
void for_each_entry(const LayerDelta& d, Fn&& fn) {
  const bool sparse = d.sparsity == Sparsity::kTwoOfFour;
  const bool raw = d.bits == 16;
  const std::int32_t qmax = raw ? 0 : qmax_for_bits(d.bits);
  const std::size_t per_word = raw ? 0 : codes_per_word(d.bits);
  const std::uint32_t mask = raw ? 0u : (1u << d.bits) - 1u;
  const std::size_t gpr = d.groups_per_row();

  std::size_t value_index = 0;
  auto value_at = [&](std::size_t row, std::size_t col) -> double {
    const std::size_t j = value_index++;
    if (raw) return read_raw_double(d.packed_values, j);
    const std::uint32_t u = (d.packed_values[j / per_word] >> (d.bits * (j % per_word))) & mask;
    const double scale = d.scales[row * gpr + col / d.group_size];
    return dequantize_value(static_cast<std::int32_t>(u) - qmax, scale);
  };

  std::size_t group_index = 0;
  for (std::size_t r = 0; r < d.rows; ++r) {
    if (sparse) {
      for (std::size_t g = 0; g < d.cols / 4; ++g, ++group_index) {
        const std::uint8_t byte = d.index_stream[group_index / 2];
        const std::uint8_t nibble = (group_index % 2 == 0) ? (byte & 0x0F) : (byte >> 4);
        const std::size_t c0 = 4 * g + (nibble & 0x3);
        const std::size_t c1 = 4 * g + ((nibble >> 2) & 0x3);
        fn(r, c0, value_at(r, c0));
        fn(r, c1, value_at(r, c1));
      }
    } else {
      for (std::size_t c = 0; c < d.cols; ++c) fn(r, c, value_at(r, c));
    }
  }
}

}  // namespace deltazip::compress
