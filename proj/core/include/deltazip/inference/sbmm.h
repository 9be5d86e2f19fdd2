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
#include <map>
#include <span>
#include <vector>

#include "deltazip/compress/layer_delta.h"
#include "deltazip/compress/pipeline.h"
#include "deltazip/matrix.h"
#include "deltazip/weight_stack.h"

namespace deltazip::inference {

using compress::LayerDelta;

// A served fine-tune: its per-layer deltas stay packed and are decoded on
// the fly each time they are applied.
struct DeltaHandle {
  int delta_id = 0;
  std::vector<LayerDelta> layers;
};

// Throws ShapeError unless the delta has one layer per base layer with the
// same shape.
DeltaHandle make_delta_handle(int delta_id, compress::CompressedDelta delta,
                              const WeightStack& base);

struct BatchRow {
  std::int64_t request_id = 0;
  int delta_id = 0;
  std::vector<double> x;
};

struct BatchInput {
  std::vector<BatchRow> rows;
};

struct RequestOutput {
  std::int64_t request_id = 0;
  std::vector<double> y;
};

// w_base * x + delta~ * x, where the second product runs over the packed
// delta. x is (in x n).
Matrix decoupled_linear(const Matrix& w_base, const LayerDelta& delta, const Matrix& x);

struct DeltaGroup {
  int delta_id = 0;
  std::size_t begin = 0;  // range in sorted order
  std::size_t end = 0;
};

struct Grouping {
  // order[k] is the original index of the row at sorted position k.
  std::vector<std::size_t> order;
  // position[i] is the sorted position of original row i.
  std::vector<std::size_t> position;
  std::vector<DeltaGroup> groups;
};

// Stable sort by delta id, ascending, with one contiguous group per id.
Grouping group_by_delta(std::span<const int> delta_ids);
Grouping group_by_delta(const BatchInput& batch);

using DeltaLookup = std::map<int, const LayerDelta*>;

// Column form of the selective batched matmul. Column i of x is served by
// delta delta_ids[i]. The base product is one matmul over the whole
// (reordered) batch and each delta is applied once to its contiguous slice;
// the result is returned in the original column order. Throws LookupError
// for an id missing from deltas.
Matrix sbmm_columns(const Matrix& base_layer, const DeltaLookup& deltas,
                    std::span<const int> delta_ids, const Matrix& x);

// Row-record form. Outputs come back in batch order.
std::vector<RequestOutput> sbmm(const Matrix& base_layer, const DeltaLookup& deltas,
                                const BatchInput& batch);
std::vector<RequestOutput> sbmm(const Matrix& base_layer,
                                const std::map<int, LayerDelta>& deltas,
                                const BatchInput& batch);

// Packs the row vectors as columns of an (in x batch) matrix. Throws
// ShapeError on an empty batch or ragged rows.
Matrix batch_columns(const BatchInput& batch);

}  // namespace deltazip::inference
