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

#include "deltazip/compress/quantizer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::compress {
namespace {

void require_bits(int bits) {
  if (bits < 2 || bits > 16) {
    throw ArgumentError("quantizer bits must be in [2, 16], got " + std::to_string(bits));
  }
}

}  // namespace

std::int32_t quantize_value(double value, double scale, std::int32_t qmax) {
  if (scale == 0.0) return 0;
  // nearbyint honours the default FE_TONEAREST mode: ties go to even.
  const double r = std::nearbyint(value / scale);
  const double clamped = std::clamp(r, -static_cast<double>(qmax), static_cast<double>(qmax));
  return static_cast<std::int32_t>(clamped);
}

QuantizedGroup quantize_group(std::span<const double> values, int bits) {
  require_bits(bits);
  const std::int32_t qmax = qmax_for_bits(bits);
  double max_abs = 0.0;
  for (double v : values) max_abs = std::max(max_abs, std::abs(v));
  QuantizedGroup out;
  out.scale = max_abs / qmax;
  out.codes.reserve(values.size());
  for (double v : values) out.codes.push_back(quantize_value(v, out.scale, qmax));
  return out;
}

std::vector<double> dequantize_group(const QuantizedGroup& group) {
  std::vector<double> out;
  out.reserve(group.codes.size());
  for (auto c : group.codes) out.push_back(dequantize_value(c, group.scale));
  return out;
}

std::vector<std::uint32_t> pack_codes(std::span<const std::int32_t> codes, int bits) {
  require_bits(bits);
  const std::int32_t qmax = qmax_for_bits(bits);
  const std::size_t per_word = codes_per_word(bits);
  std::vector<std::uint32_t> words((codes.size() + per_word - 1) / per_word, 0u);
  for (std::size_t j = 0; j < codes.size(); ++j) {
    const std::int32_t c = codes[j];
    if (c < -qmax || c > qmax) {
      throw EncodingError("code " + std::to_string(c) + " at index " + std::to_string(j) +
                          " is outside [-" + std::to_string(qmax) + ", " +
                          std::to_string(qmax) + "]");
    }
    const auto u = static_cast<std::uint32_t>(c + qmax);
    words[j / per_word] |= u << (bits * (j % per_word));
  }
  return words;
}

std::vector<std::int32_t> unpack_codes(std::span<const std::uint32_t> words, int bits,
                                       std::size_t count) {
  require_bits(bits);
  const std::int32_t qmax = qmax_for_bits(bits);
  const std::size_t per_word = codes_per_word(bits);
  if (words.size() * per_word < count) {
    throw EncodingError("packed stream holds fewer than " + std::to_string(count) + " codes");
  }
  const std::uint32_t mask = (1u << bits) - 1u;
  std::vector<std::int32_t> codes(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint32_t u = (words[j / per_word] >> (bits * (j % per_word))) & mask;
    const auto c = static_cast<std::int32_t>(u) - qmax;
    if (c > qmax) throw EncodingError("packed field at index " + std::to_string(j) + " is off-grid");
    codes[j] = c;
  }
  return codes;
}

}  // namespace deltazip::compress
