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

#include <map>
#include <optional>
#include <vector>

#include "deltazip/inference/sbmm.h"
#include "deltazip/inference/tensor_parallel.h"
#include "deltazip/weight_stack.h"

namespace deltazip::inference {

// Serves a mixed batch through the whole stack. Every linear layer is the
// base product plus the request's own packed delta, merged before the tanh
// that sits between layers; the merged weights are never materialized.
// With a layout of more than one worker each layer runs tensor-parallel,
// every worker serving all deltas on its shard.
//
// Throws LookupError for a delta id missing from deltas, ShapeError for
// inconsistent widths and PartitionError for a layout that does not fit.
std::vector<RequestOutput> forward_model(const WeightStack& base,
                                         const std::map<int, DeltaHandle>& deltas,
                                         const BatchInput& batch,
                                         const std::optional<TpLayout>& layout = std::nullopt);

}  // namespace deltazip::inference
