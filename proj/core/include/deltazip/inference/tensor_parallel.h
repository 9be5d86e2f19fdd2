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
#include <vector>

#include "deltazip/compress/layer_delta.h"
#include "deltazip/matrix.h"
#include "deltazip/weight_stack.h"

namespace deltazip::inference {

// Tensor-parallel helpers use the activation-times-weight orientation:
// activations are (batch x features) and a layer is w = W^T with shape
// (in x out). A column-parallel layer splits w's columns (output features),
// a row-parallel layer splits w's rows (input features).

struct TpLayout {
  std::size_t n_workers = 1;
  std::vector<ParallelAxis> axes;  // one per layer
};

// Layout from the stack's axis tags. Throws PartitionError if some layer is
// not divisible across n_workers along its axis.
TpLayout make_tp_layout(const WeightStack& stack, std::size_t n_workers);

// n contiguous column blocks (kColumn) or row blocks (kRow) of w.
// Throws PartitionError on n == 0 or a non-divisible dimension.
std::vector<Matrix> tp_partition(const Matrix& w, ParallelAxis axis, std::size_t n);

// One worker's slice of a packed delta, cut the same way as the base layer.
// It is a view: the delta stays packed and must outlive the shard.
struct DeltaShard {
  const compress::LayerDelta* delta = nullptr;
  ParallelAxis axis = ParallelAxis::kColumn;
  std::size_t begin = 0;  // output features (kColumn) or input features (kRow)
  std::size_t end = 0;
};

std::vector<DeltaShard> tp_partition_delta(const compress::LayerDelta& delta, ParallelAxis axis,
                                           std::size_t n);

// x_part * (slice of delta~)^T for one worker. For a row shard x_part holds
// only the worker's input features.
Matrix apply_delta_shard(const DeltaShard& shard, const Matrix& x_part);

// One layer across all workers. Column layers concatenate the per-worker
// outputs; row layers split x by input features and sum the partial
// products in worker order (the simulated all-reduce). Throws PartitionError
// if the shards do not describe the same layout.
Matrix tp_forward(const std::vector<Matrix>& base_shards,
                  const std::vector<DeltaShard>& delta_shards, const Matrix& x,
                  ParallelAxis axis);

// Whole stack with tanh between layers. Activations leaving a column layer
// stay sharded when the next layer is row-parallel, so a column/row pair
// needs a single all-reduce. deltas may be empty (base only) or hold one
// LayerDelta per layer. x is (batch x in).
Matrix tp_forward_stack(const WeightStack& base, const std::vector<compress::LayerDelta>& deltas,
                        const Matrix& x, const TpLayout& layout);

}  // namespace deltazip::inference
