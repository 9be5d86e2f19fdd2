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

#include "deltazip/compress/delta_format.h"

#include <json.hpp>
#include <string>

#include "../byte_io.h"
#include "deltazip/compress/lossless.h"
#include "deltazip/errors.h"

namespace deltazip::compress {
namespace {

constexpr char kDeltaMagic[4] = {'D', 'Z', 'D', 'L'};
constexpr std::uint16_t kDeltaVersion = 1;
constexpr std::uint16_t kFlagLossless = 0x1;

std::uint32_t checked_u32(std::size_t n, const std::string& what) {
  if (n > 0xFFFFFFFFu) throw EncodingError(what + " exceeds 4 GiB");
  return static_cast<std::uint32_t>(n);
}

std::vector<std::uint8_t> words_to_bytes(const std::vector<std::uint32_t>& words) {
  detail::ByteWriter w;
  for (auto v : words) w.u32(v);
  return w.take();
}

std::string header_json(const CompressedDelta& cd) {
  nlohmann::ordered_json h;
  h["base_model_id"] = cd.base_model_id;
  h["bits"] = cd.config.bits;
  h["sparsity"] = std::string(to_string(cd.config.sparsity));
  h["group_size"] = cd.config.group_size;
  h["layer_count"] = cd.layers.size();
  h["calibration_fingerprint"] = cd.calibration_fingerprint;
  h["damping"] = cd.config.damping;
  h["block_size"] = cd.config.block_size;
  h["lossless"] = std::string(to_string(cd.config.lossless));
  return h.dump();
}

struct Header {
  CompressedDelta shell;
  std::size_t layer_count = 0;
};

Header parse_header(std::string_view text, std::size_t offset) {
  try {
    const auto h = nlohmann::json::parse(text);
    Header out;
    out.shell.base_model_id = h.at("base_model_id").get<std::string>();
    out.shell.config.bits = h.at("bits").get<int>();
    out.shell.config.sparsity = parse_sparsity(h.at("sparsity").get<std::string>());
    out.shell.config.group_size = h.at("group_size").get<std::size_t>();
    out.shell.calibration_fingerprint = h.at("calibration_fingerprint").get<std::uint64_t>();
    out.shell.config.damping = h.value("damping", 0.01);
    out.shell.config.block_size = h.value("block_size", std::size_t{32});
    out.shell.config.lossless = parse_lossless(h.value("lossless", std::string("off")));
    out.layer_count = h.at("layer_count").get<std::size_t>();
    out.shell.config.validate();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad JSON header: ") + e.what(), offset);
  } catch (const InputError& e) {
    throw FormatError(std::string("bad JSON header: ") + e.what(), offset);
  }
}

}  // namespace

std::vector<std::uint8_t> encode_delta(const CompressedDelta& cd) {
  cd.config.validate();
  const bool lossless = cd.config.lossless == Lossless::kDeflate;
  detail::ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kDeltaMagic), 4});
  w.u16(kDeltaVersion);
  w.u16(lossless ? kFlagLossless : 0);
  const std::string header = header_json(cd);
  w.u32(checked_u32(header.size(), "header"));
  w.str(header);
  for (const LayerDelta& d : cd.layers) {
    if (d.bits != cd.config.bits || d.sparsity != cd.config.sparsity ||
        d.group_size != cd.config.group_size) {
      throw EncodingError("layer '" + d.name + "' was compressed with a different config");
    }
    d.validate();
    if (d.name.size() > 0xFFFF) throw EncodingError("layer name longer than 65535 bytes");
    w.u16(static_cast<std::uint16_t>(d.name.size()));
    w.str(d.name);
    w.u32(d.rows);
    w.u32(d.cols);
    w.u32(checked_u32(4 * d.scales.size(), "scales"));
    for (float s : d.scales) w.f32(s);
    w.u32(checked_u32(d.index_stream.size(), "index stream"));
    w.bytes(d.index_stream);
    auto payload = words_to_bytes(d.packed_values);
    if (lossless) payload = lossless_encode(payload, CodecId::kDeflate);
    w.u32(checked_u32(payload.size(), "payload"));
    w.bytes(payload);
  }
  return w.take();
}

DeltaInspection inspect_delta(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kDeltaMagic)) {
    throw FormatError("not a DZDL file (bad magic)", 0);
  }
  const std::size_t version_at = r.offset();
  if (const auto v = r.u16(); v != kDeltaVersion) {
    throw FormatError("unsupported DZDL version " + std::to_string(v), version_at);
  }
  const std::size_t flags_at = r.offset();
  const std::uint16_t flags = r.u16();
  if ((flags & ~kFlagLossless) != 0) {
    throw FormatError("unknown DZDL flag bits", flags_at);
  }
  const bool lossless = (flags & kFlagLossless) != 0;
  const std::uint32_t header_len = r.u32();
  const std::size_t header_at = r.offset();
  Header header = parse_header(r.str(header_len), header_at);
  if (lossless != (header.shell.config.lossless == Lossless::kDeflate)) {
    throw FormatError("lossless flag disagrees with the header", flags_at);
  }

  DeltaInspection out;
  out.delta = std::move(header.shell);
  const CompressConfig& cfg = out.delta.config;
  for (std::size_t i = 0; i < header.layer_count; ++i) {
    const std::size_t layer_at = r.offset();
    LayerDelta d;
    d.name = r.str(r.u16());
    d.rows = r.u32();
    d.cols = r.u32();
    d.bits = cfg.bits;
    d.sparsity = cfg.sparsity;
    d.group_size = static_cast<std::uint32_t>(cfg.group_size);

    const std::size_t scales_at = r.offset();
    const std::uint32_t scales_len = r.u32();
    if (scales_len % 4 != 0) throw FormatError("scales length is not a multiple of 4", scales_at);
    r.require(scales_len, "scales");
    d.scales.reserve(scales_len / 4);
    for (std::uint32_t k = 0; k < scales_len / 4; ++k) d.scales.push_back(r.f32());

    const std::uint32_t index_len = r.u32();
    const auto index = r.bytes(index_len);
    d.index_stream.assign(index.begin(), index.end());

    const std::size_t payload_at = r.offset();
    const std::uint32_t payload_len = r.u32();
    auto payload_span = r.bytes(payload_len);
    std::vector<std::uint8_t> payload(payload_span.begin(), payload_span.end());
    if (lossless) {
      try {
        payload = lossless_decode(payload);
      } catch (const DecodeError& e) {
        throw FormatError("layer '" + d.name + "': " + e.what(), payload_at);
      }
    }
    if (payload.size() % 4 != 0) {
      throw FormatError("layer '" + d.name + "': payload is not whole u32 words", payload_at);
    }
    detail::ByteReader words(payload);
    d.packed_values.reserve(payload.size() / 4);
    while (words.remaining() > 0) d.packed_values.push_back(words.u32());

    try {
      d.validate();
    } catch (const EncodingError& e) {
      throw FormatError(e.what(), layer_at);
    }
    out.layers.push_back(LayerFootprint{d.name, d.rows, d.cols, scales_len, index_len,
                                        payload_len});
    out.delta.layers.push_back(std::move(d));
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after the last layer", r.offset());

  out.file_bytes = bytes.size();
  out.dense_fp16_bytes = dense_fp16_bytes(out.delta);
  out.compression_ratio = out.file_bytes == 0 ? 0.0
                                               : static_cast<double>(out.dense_fp16_bytes) /
                                                     static_cast<double>(out.file_bytes);
  return out;
}

CompressedDelta decode_delta(std::span<const std::uint8_t> bytes) {
  return std::move(inspect_delta(bytes).delta);
}

void write_delta(const CompressedDelta& cd, const std::filesystem::path& path) {
  detail::write_file(path, encode_delta(cd));
}

CompressedDelta read_delta(const std::filesystem::path& path) {
  return decode_delta(detail::read_file(path));
}

std::size_t dense_fp16_bytes(const CompressedDelta& cd) {
  std::size_t n = 0;
  for (const auto& d : cd.layers) n += 2 * std::size_t{d.rows} * d.cols;
  return n;
}

}  // namespace deltazip::compress
