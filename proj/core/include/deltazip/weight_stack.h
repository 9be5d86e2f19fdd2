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

#include "deltazip/matrix.h"

namespace deltazip {

// Megatron-style tensor-parallel role of a linear layer. Column-parallel
// layers split their output features across workers, row-parallel layers
// split their input features and finish with an all-reduce.
enum class ParallelAxis { kColumn, kRow };

// One linear layer. The weight is stored (out_features x in_features) so a
// layer maps activations X (in x samples) to W * X.
struct Layer {
  std::string name;
  Matrix weight;
  ParallelAxis axis = ParallelAxis::kColumn;

  bool operator==(const Layer&) const = default;
};

// Ordered chain of linear layers: layer n+1's input width equals layer n's
// output width, and names are unique.
class WeightStack {
 public:
  WeightStack() = default;

  // Throws ArgumentError on a duplicate name, ShapeError on a chain break.
  void add_layer(std::string name, Matrix weight,
                 ParallelAxis axis = ParallelAxis::kColumn);

  std::size_t size() const { return layers_.size(); }
  bool empty() const { return layers_.empty(); }
  const Layer& operator[](std::size_t i) const { return layers_[i]; }
  Layer& operator[](std::size_t i) { return layers_[i]; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t input_dim() const;
  std::size_t output_dim() const;

  // Shapes and names match layer for layer.
  bool same_structure(const WeightStack& other) const;

  bool operator==(const WeightStack&) const = default;

 private:
  std::vector<Layer> layers_;
};

// Chained product W_{L-1} * ... * W_0 * x with no nonlinearity.
Matrix linear_forward(const WeightStack& stack, const Matrix& x);

// Chain with tanh between consecutive layers (not after the last one).
Matrix activated_forward(const WeightStack& stack, const Matrix& x);

// "DZWT" weight container: magic, u16 version, u32 layer count, then per
// layer u16 name length + name, u32 rows, u32 cols, row-major f32 payload.
// Everything little-endian. Values are narrowed to f32 on write.
void write_weight_stack(const WeightStack& stack, const std::filesystem::path& path);
WeightStack read_weight_stack(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_weight_stack(const WeightStack& stack);
WeightStack decode_weight_stack(std::span<const std::uint8_t> bytes);

}  // namespace deltazip
