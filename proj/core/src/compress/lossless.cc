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

#include "deltazip/compress/lossless.h"

#include <zlib.h>

#include <limits>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::compress {
namespace {

constexpr std::size_t kContainerHeader = 1 + 8;
// Deflate cannot expand by more than ~1032:1; anything above is corrupt.
constexpr std::size_t kMaxDeflateRatio = 1032;

class IdentityCodec final : public ByteCodec {
 public:
  CodecId id() const override { return CodecId::kIdentity; }
  std::string_view name() const override { return "identity"; }
  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const override {
    return {raw.begin(), raw.end()};
  }
  std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded,
                                   std::size_t raw_size) const override {
    if (encoded.size() != raw_size) throw DecodeError("identity payload length mismatch");
    return {encoded.begin(), encoded.end()};
  }
};

class DeflateCodec final : public ByteCodec {
 public:
  CodecId id() const override { return CodecId::kDeflate; }
  std::string_view name() const override { return "deflate"; }

  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const override {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    const int rc = compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                             Z_BEST_COMPRESSION);
    if (rc != Z_OK) throw Error("deflate failed with zlib code " + std::to_string(rc));
    out.resize(bound);
    return out;
  }

  std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded,
                                   std::size_t raw_size) const override {
    if (raw_size > encoded.size() * kMaxDeflateRatio + 64 ||
        raw_size > std::numeric_limits<uLong>::max()) {
      throw DecodeError("declared length " + std::to_string(raw_size) +
                        " is implausible for a deflate payload of " +
                        std::to_string(encoded.size()) + " bytes");
    }
    std::vector<std::uint8_t> out(raw_size);
    uLongf got = static_cast<uLongf>(raw_size);
    // uncompress wants a non-null destination even for empty output.
    std::uint8_t dummy = 0;
    const int rc = uncompress(raw_size == 0 ? &dummy : out.data(), &got, encoded.data(),
                              static_cast<uLong>(encoded.size()));
    if (rc != Z_OK || got != raw_size) {
      throw DecodeError("corrupt deflate stream (zlib code " + std::to_string(rc) + ")");
    }
    return out;
  }
};

}  // namespace

const ByteCodec& codec_for(CodecId id) {
  static const IdentityCodec identity;
  static const DeflateCodec deflate;
  switch (id) {
    case CodecId::kIdentity:
      return identity;
    case CodecId::kDeflate:
      return deflate;
  }
  throw DecodeError("unknown codec id " + std::to_string(static_cast<int>(id)));
}

std::vector<std::uint8_t> lossless_encode(std::span<const std::uint8_t> raw, CodecId codec) {
  const auto payload = codec_for(codec).encode(raw);
  std::vector<std::uint8_t> out;
  out.reserve(kContainerHeader + payload.size());
  out.push_back(static_cast<std::uint8_t>(codec));
  const std::uint64_t n = raw.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> lossless_decode(std::span<const std::uint8_t> container) {
  if (container.size() < kContainerHeader) throw DecodeError("lossless container is truncated");
  const auto id = container[0];
  if (id > static_cast<std::uint8_t>(CodecId::kDeflate)) {
    throw DecodeError("unknown codec id " + std::to_string(id));
  }
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= std::uint64_t{container[1 + i]} << (8 * i);
  if (n > std::numeric_limits<std::size_t>::max()) throw DecodeError("declared length overflows");
  return codec_for(static_cast<CodecId>(id)).decode(container.subspan(kContainerHeader),
                                                    static_cast<std::size_t>(n));
}

}  // namespace deltazip::compress
