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

#include "deltazip/weight_stack.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <limits>

#include "byte_io.h"
#include "deltazip/errors.h"

namespace deltazip {
namespace {

constexpr char kWeightMagic[4] = {'D', 'Z', 'W', 'T'};
constexpr std::uint16_t kWeightVersion = 1;

}  // namespace

void WeightStack::add_layer(std::string name, Matrix weight, ParallelAxis axis) {
  for (const auto& l : layers_) {
    if (l.name == name) throw ArgumentError("duplicate layer name '" + name + "'");
  }
  if (!layers_.empty() && layers_.back().weight.rows() != weight.cols()) {
    throw ShapeError("layer '" + name + "' expects input width " +
                     std::to_string(weight.cols()) + " but previous layer '" +
                     layers_.back().name + "' outputs " +
                     std::to_string(layers_.back().weight.rows()));
  }
  layers_.push_back(Layer{std::move(name), std::move(weight), axis});
}

std::size_t WeightStack::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().weight.cols();
}

std::size_t WeightStack::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().weight.rows();
}

bool WeightStack::same_structure(const WeightStack& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].name != other.layers_[i].name ||
        !layers_[i].weight.same_shape(other.layers_[i].weight)) {
      return false;
    }
  }
  return true;
}

Matrix linear_forward(const WeightStack& stack, const Matrix& x) {
  Matrix y = x;
  for (const auto& layer : stack.layers()) y = matmul(layer.weight, y);
  return y;
}

Matrix activated_forward(const WeightStack& stack, const Matrix& x) {
  Matrix y = x;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    y = matmul(stack[i].weight, y);
    if (i + 1 < stack.size()) y = tanh(y);
  }
  return y;
}

std::vector<std::uint8_t> encode_weight_stack(const WeightStack& stack) {
  detail::ByteWriter w;
  w.str(std::string_view(kWeightMagic, 4));
  w.u16(kWeightVersion);
  w.u32(static_cast<std::uint32_t>(stack.size()));
  for (const auto& layer : stack.layers()) {
    if (layer.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ArgumentError("layer name too long: " + layer.name);
    }
    w.u16(static_cast<std::uint16_t>(layer.name.size()));
    w.str(layer.name);
    w.u32(static_cast<std::uint32_t>(layer.weight.rows()));
    w.u32(static_cast<std::uint32_t>(layer.weight.cols()));
    for (double v : layer.weight.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

WeightStack decode_weight_stack(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  auto magic = r.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), kWeightMagic)) {
    throw FormatError("bad magic, expected DZWT", 0);
  }
  const std::size_t version_at = r.offset();
  if (r.u16() != kWeightVersion) throw FormatError("unsupported DZWT version", version_at);
  const std::uint32_t count = r.u32();
  WeightStack stack;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t layer_at = r.offset();
    std::string name = r.str(r.u16());
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows == 0 || cols == 0) throw FormatError("zero-sized layer '" + name + "'", layer_at);
    const std::uint64_t n = std::uint64_t{rows} * cols;
    if (n > r.remaining() / 4) throw FormatError("truncated layer payload", r.offset());
    std::vector<double> data(n);
    for (auto& v : data) v = r.f32();
    try {
      stack.add_layer(std::move(name), Matrix(rows, cols, std::move(data)));
    } catch (const InputError& e) {
      throw FormatError(e.what(), layer_at);
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after last layer", r.offset());
  return stack;
}

void write_weight_stack(const WeightStack& stack, const std::filesystem::path& path) {
  detail::write_file(path, encode_weight_stack(stack));
}

WeightStack read_weight_stack(const std::filesystem::path& path) {
  return decode_weight_stack(detail::read_file(path));
}

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("short write to '" + path.string() + "'");
}

}  // namespace detail
}  // namespace deltazip
