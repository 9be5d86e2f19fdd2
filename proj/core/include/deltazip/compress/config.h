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
#include <string>
#include <string_view>

namespace deltazip::compress {

enum class Sparsity { kNone, kTwoOfFour };
enum class Lossless { kOff, kDeflate };

std::string_view to_string(Sparsity s);
std::string_view to_string(Lossless l);
// Accepts "none"/"dense" and "2:4"/"two_of_four". Throws ArgumentError.
Sparsity parse_sparsity(std::string_view s);
Lossless parse_lossless(std::string_view s);

struct CompressConfig {
  // 2, 3, 4 or 8 select the symmetric group quantizer; 16 is a pass-through
  // that keeps values exactly.
  int bits = 4;
  Sparsity sparsity = Sparsity::kTwoOfFour;
  // Columns per quantization group; the last group of a row may be shorter.
  std::size_t group_size = 128;
  // Relative Hessian damping: lambda * mean(diag(X X^T)) is added to the diagonal.
  double damping = 0.01;
  // Columns per lazy-update block of the OBS solver. Must be a multiple of 4
  // when 2:4 sparsity is on.
  std::size_t block_size = 32;
  Lossless lossless = Lossless::kOff;

  bool passthrough() const { return bits == 16; }

  // Throws ArgumentError on an unsupported combination.
  void validate() const;

  bool operator==(const CompressConfig&) const = default;
};

}  // namespace deltazip::compress
