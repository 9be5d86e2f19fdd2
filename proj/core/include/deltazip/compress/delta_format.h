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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deltazip/compress/pipeline.h"

namespace deltazip::compress {

// "DZDL" compressed-delta file, little-endian:
//   magic "DZDL", u16 version, u16 flags (bit 0: payloads are lossless-coded),
//   u32 header length, UTF-8 JSON header, then per layer
//   u16 name length + name, u32 rows, u32 cols,
//   u32 scales length + f32 scales, u32 index length + index bytes,
//   u32 payload length + payload.
// Every length counts bytes. Without the lossless flag the payload is the
// packed u32 words; with it, a lossless_encode container of those words.
std::vector<std::uint8_t> encode_delta(const CompressedDelta& cd);
// Throws FormatError (with byte offset) on bad magic, version, flags,
// header, truncation, trailing bytes or inconsistent layer streams.
CompressedDelta decode_delta(std::span<const std::uint8_t> bytes);

void write_delta(const CompressedDelta& cd, const std::filesystem::path& path);
CompressedDelta read_delta(const std::filesystem::path& path);

// Size of the same layers stored densely at 16 bits per value.
std::size_t dense_fp16_bytes(const CompressedDelta& cd);

struct LayerFootprint {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::size_t scales_bytes = 0;
  std::size_t index_bytes = 0;
  std::size_t payload_bytes = 0;  // as stored, after any lossless coding
};

struct DeltaInspection {
  CompressedDelta delta;
  std::vector<LayerFootprint> layers;
  std::size_t file_bytes = 0;
  std::size_t dense_fp16_bytes = 0;
  // dense_fp16_bytes / file_bytes.
  double compression_ratio = 0.0;
};

DeltaInspection inspect_delta(std::span<const std::uint8_t> bytes);

}  // namespace deltazip::compress
