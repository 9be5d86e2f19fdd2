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

#include "deltazip/inference/tensor_parallel.h"

#include <string>

#include "deltazip/errors.h"

namespace deltazip::inference {
namespace {

const char* axis_name(ParallelAxis a) { return a == ParallelAxis::kColumn ? "column" : "row"; }

void require_divisible(std::size_t dim, std::size_t n, const std::string& what) {
  if (n == 0) throw PartitionError("tensor parallelism needs at least one worker");
  if (dim % n != 0) {
    throw PartitionError(what + " of size " + std::to_string(dim) + " is not divisible by " +
                         std::to_string(n) + " workers");
  }
}

// Activations between layers: either every worker holds the full matrix or
// worker i holds column block i.
struct Activation {
  Matrix full{1, 1};
  std::vector<Matrix> shards;
  bool sharded() const { return !shards.empty(); }
  Matrix gather() const { return sharded() ? hconcat(shards) : full; }
};

}  // namespace

TpLayout make_tp_layout(const WeightStack& stack, std::size_t n_workers) {
  TpLayout layout{n_workers, {}};
  for (const auto& layer : stack.layers()) {
    // W is (out x in): column-parallel splits out, row-parallel splits in.
    const std::size_t dim =
        layer.axis == ParallelAxis::kColumn ? layer.weight.rows() : layer.weight.cols();
    require_divisible(dim, n_workers,
                      std::string(axis_name(layer.axis)) + "-parallel layer '" + layer.name + "'");
    layout.axes.push_back(layer.axis);
  }
  return layout;
}

std::vector<Matrix> tp_partition(const Matrix& w, ParallelAxis axis, std::size_t n) {
  const bool by_cols = axis == ParallelAxis::kColumn;
  const std::size_t dim = by_cols ? w.cols() : w.rows();
  require_divisible(dim, n, by_cols ? "column count" : "row count");
  const std::size_t step = dim / n;
  std::vector<Matrix> shards;
  shards.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    shards.push_back(by_cols ? slice_cols(w, i * step, (i + 1) * step)
                             : slice_rows(w, i * step, (i + 1) * step));
  }
  return shards;
}

std::vector<DeltaShard> tp_partition_delta(const compress::LayerDelta& delta, ParallelAxis axis,
                                           std::size_t n) {
  // In w = W^T orientation the output features are the delta's rows.
  const std::size_t dim = axis == ParallelAxis::kColumn ? delta.rows : delta.cols;
  require_divisible(dim, n, "delta '" + delta.name + "'");
  const std::size_t step = dim / n;
  std::vector<DeltaShard> shards;
  for (std::size_t i = 0; i < n; ++i) {
    shards.push_back(DeltaShard{&delta, axis, i * step, (i + 1) * step});
  }
  return shards;
}

Matrix apply_delta_shard(const DeltaShard& shard, const Matrix& x_part) {
  if (shard.delta == nullptr) throw PartitionError("empty delta shard");
  const auto& d = *shard.delta;
  const bool column = shard.axis == ParallelAxis::kColumn;
  const std::size_t in_width = column ? d.cols : shard.end - shard.begin;
  const std::size_t out_width = column ? shard.end - shard.begin : d.rows;
  if (x_part.cols() != in_width) {
    throw PartitionError("delta shard of '" + d.name + "' expects " + std::to_string(in_width) +
                         " input features, got " + std::to_string(x_part.cols()));
  }
  Matrix y(x_part.rows(), out_width);
  const std::size_t batch = x_part.rows();
  compress::for_each_entry(d, [&](std::size_t r, std::size_t c, double v) {
    std::size_t out_col = r;
    std::size_t in_col = c;
    if (column) {
      if (r < shard.begin || r >= shard.end) return;
      out_col = r - shard.begin;
    } else {
      if (c < shard.begin || c >= shard.end) return;
      in_col = c - shard.begin;
    }
    for (std::size_t b = 0; b < batch; ++b) y(b, out_col) += x_part(b, in_col) * v;
  });
  return y;
}

namespace {

void check_shards(const std::vector<Matrix>& base_shards,
                  const std::vector<DeltaShard>& delta_shards, ParallelAxis axis) {
  if (base_shards.empty()) throw PartitionError("tp_forward: no base shards");
  if (!delta_shards.empty() && delta_shards.size() != base_shards.size()) {
    throw PartitionError("tp_forward: " + std::to_string(base_shards.size()) +
                         " base shards but " + std::to_string(delta_shards.size()) +
                         " delta shards");
  }
  for (std::size_t i = 0; i < delta_shards.size(); ++i) {
    const auto& s = delta_shards[i];
    const auto& b = base_shards[i];
    const bool match = s.axis == axis && s.delta != nullptr &&
                       (axis == ParallelAxis::kColumn
                            ? (s.end - s.begin == b.cols() && s.delta->cols == b.rows())
                            : (s.end - s.begin == b.rows() && s.delta->rows == b.cols()));
    if (!match) {
      throw PartitionError("tp_forward: delta shard " + std::to_string(i) +
                           " does not match the base shard layout");
    }
  }
}

// Worker i's contribution: x_i * w_i + x_i * delta_i.
Matrix worker_product(const Matrix& base_shard, const std::vector<DeltaShard>& delta_shards,
                      std::size_t i, const Matrix& x_i) {
  Matrix y = matmul(x_i, base_shard);
  if (!delta_shards.empty()) y = y + apply_delta_shard(delta_shards[i], x_i);
  return y;
}

std::vector<Matrix> column_layer(const std::vector<Matrix>& base_shards,
                                 const std::vector<DeltaShard>& delta_shards, const Matrix& x) {
  std::vector<Matrix> out;
  out.reserve(base_shards.size());
  for (std::size_t i = 0; i < base_shards.size(); ++i) {
    if (x.cols() != base_shards[i].rows()) {
      throw PartitionError("tp_forward: column shard expects " +
                           std::to_string(base_shards[i].rows()) + " inputs, got " +
                           std::to_string(x.cols()));
    }
    out.push_back(worker_product(base_shards[i], delta_shards, i, x));
  }
  return out;
}

Matrix row_layer(const std::vector<Matrix>& base_shards,
                 const std::vector<DeltaShard>& delta_shards, const std::vector<Matrix>& x_parts) {
  Matrix sum(1, 1);
  for (std::size_t i = 0; i < base_shards.size(); ++i) {
    if (x_parts[i].cols() != base_shards[i].rows()) {
      throw PartitionError("tp_forward: row shard " + std::to_string(i) + " expects " +
                           std::to_string(base_shards[i].rows()) + " inputs, got " +
                           std::to_string(x_parts[i].cols()));
    }
    Matrix partial = worker_product(base_shards[i], delta_shards, i, x_parts[i]);
    sum = i == 0 ? std::move(partial) : sum + partial;
  }
  return sum;
}

std::vector<Matrix> split_features(const Matrix& x, std::size_t n) {
  require_divisible(x.cols(), n, "activation width");
  const std::size_t step = x.cols() / n;
  std::vector<Matrix> parts;
  for (std::size_t i = 0; i < n; ++i) parts.push_back(slice_cols(x, i * step, (i + 1) * step));
  return parts;
}

}  // namespace

Matrix tp_forward(const std::vector<Matrix>& base_shards,
                  const std::vector<DeltaShard>& delta_shards, const Matrix& x,
                  ParallelAxis axis) {
  check_shards(base_shards, delta_shards, axis);
  if (axis == ParallelAxis::kColumn) return hconcat(column_layer(base_shards, delta_shards, x));
  return row_layer(base_shards, delta_shards, split_features(x, base_shards.size()));
}

Matrix tp_forward_stack(const WeightStack& base, const std::vector<compress::LayerDelta>& deltas,
                        const Matrix& x, const TpLayout& layout) {
  if (layout.axes.size() != base.size()) {
    throw PartitionError("tp_forward_stack: layout covers " + std::to_string(layout.axes.size()) +
                         " layers, stack has " + std::to_string(base.size()));
  }
  if (!deltas.empty() && deltas.size() != base.size()) {
    throw PartitionError("tp_forward_stack: need one delta per layer");
  }
  const std::size_t n = layout.n_workers;
  Activation act{x, {}};
  for (std::size_t l = 0; l < base.size(); ++l) {
    const ParallelAxis axis = layout.axes[l];
    const auto base_shards = tp_partition(transpose(base[l].weight), axis, n);
    std::vector<DeltaShard> delta_shards;
    if (!deltas.empty()) delta_shards = tp_partition_delta(deltas[l], axis, n);
    check_shards(base_shards, delta_shards, axis);

    if (axis == ParallelAxis::kColumn) {
      // All-gather only if the previous layer left the activations sharded.
      act = Activation{Matrix(1, 1), column_layer(base_shards, delta_shards, act.gather())};
    } else {
      const auto parts = act.sharded() ? act.shards : split_features(act.full, n);
      act = Activation{row_layer(base_shards, delta_shards, parts), {}};
    }
    if (l + 1 < base.size()) {
      if (act.sharded()) {
        for (auto& s : act.shards) s = tanh(s);
      } else {
        act.full = tanh(act.full);
      }
    }
  }
  return act.gather();
}

}  // namespace deltazip::inference
