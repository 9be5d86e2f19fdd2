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

#include "deltazip/compress/config.h"

#include "deltazip/errors.h"

namespace deltazip::compress {

std::string_view to_string(Sparsity s) {
  return s == Sparsity::kTwoOfFour ? "2:4" : "none";
}

std::string_view to_string(Lossless l) {
  return l == Lossless::kDeflate ? "deflate" : "off";
}

Sparsity parse_sparsity(std::string_view s) {
  if (s == "2:4" || s == "two_of_four") return Sparsity::kTwoOfFour;
  if (s == "none" || s == "dense") return Sparsity::kNone;
  throw ArgumentError("unknown sparsity '" + std::string(s) + "' (expected 2:4 or none)");
}

Lossless parse_lossless(std::string_view s) {
  if (s == "deflate") return Lossless::kDeflate;
  if (s == "off" || s == "none") return Lossless::kOff;
  throw ArgumentError("unknown lossless codec '" + std::string(s) + "' (expected deflate or off)");
}

void CompressConfig::validate() const {
  if (bits != 2 && bits != 3 && bits != 4 && bits != 8 && bits != 16) {
    throw ArgumentError("bits must be one of 2, 3, 4, 8, 16; got " + std::to_string(bits));
  }
  if (group_size == 0) throw ArgumentError("group_size must be >= 1");
  if (block_size == 0) throw ArgumentError("block_size must be >= 1");
  if (sparsity == Sparsity::kTwoOfFour && block_size % 4 != 0) {
    throw ArgumentError("block_size must be a multiple of 4 with 2:4 sparsity");
  }
  if (!(damping >= 0.0)) throw ArgumentError("damping must be >= 0");
}

}  // namespace deltazip::compress
