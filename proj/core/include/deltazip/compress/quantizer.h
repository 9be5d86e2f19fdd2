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
#include <cstdint>
#include <span>
#include <vector>

namespace deltazip::compress {

// Largest code magnitude of the symmetric b-bit grid: 2^(b-1) - 1.
constexpr std::int32_t qmax_for_bits(int bits) { return (1 << (bits - 1)) - 1; }

// Codes packed into one 32-bit word; unused high bits stay zero.
constexpr std::size_t codes_per_word(int bits) { return 32 / static_cast<std::size_t>(bits); }

struct QuantizedGroup {
  std::vector<std::int32_t> codes;
  double scale = 0.0;
};

// Symmetric round-to-nearest (ties to even): scale = max|v| / qmax and
// codes = clamp(round(v / scale), -qmax, qmax). All-zero input yields
// scale 0 and zero codes. bits must be in [2, 16].
QuantizedGroup quantize_group(std::span<const double> values, int bits);

// Code for a single value on a given grid; 0 when scale == 0.
std::int32_t quantize_value(double value, double scale, std::int32_t qmax);

// code * scale, with 0 for a zero scale.
inline double dequantize_value(std::int32_t code, double scale) {
  return scale == 0.0 ? 0.0 : static_cast<double>(code) * scale;
}

std::vector<double> dequantize_group(const QuantizedGroup& group);

// Offset encoding u = code + qmax, packed least-significant first, 32/bits
// codes per word; the final word is zero padded. Throws EncodingError for a
// code outside [-qmax, qmax]. bits must be in [2, 16].
std::vector<std::uint32_t> pack_codes(std::span<const std::int32_t> codes, int bits);

// Inverse of pack_codes for the first `count` codes. Throws EncodingError if
// the words are too few or a field decodes outside the grid.
std::vector<std::int32_t> unpack_codes(std::span<const std::uint32_t> words,
                                       int bits, std::size_t count);

}  // namespace deltazip::compress
