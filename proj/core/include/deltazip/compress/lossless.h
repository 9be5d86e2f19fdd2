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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace deltazip::compress {

enum class CodecId : std::uint8_t { kIdentity = 0, kDeflate = 1 };

// A reversible byte transform. Implementations are stateless.
class ByteCodec {
 public:
  virtual ~ByteCodec() = default;
  virtual CodecId id() const = 0;
  virtual std::string_view name() const = 0;
  virtual std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const = 0;
  // raw_size is the length recorded by the container. Throws DecodeError.
  virtual std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded,
                                           std::size_t raw_size) const = 0;
};

// Throws DecodeError for an unknown id.
const ByteCodec& codec_for(CodecId id);

// Container: u8 codec id, u64 raw length, codec payload.
std::vector<std::uint8_t> lossless_encode(std::span<const std::uint8_t> raw,
                                          CodecId codec = CodecId::kDeflate);
// Throws DecodeError on an unknown codec, a corrupt payload or a length mismatch.
std::vector<std::uint8_t> lossless_decode(std::span<const std::uint8_t> container);

}  // namespace deltazip::compress
