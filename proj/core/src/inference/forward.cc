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

#include "deltazip/inference/forward.h"

#include <algorithm>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::inference {
namespace {

const DeltaHandle& find_handle(const std::map<int, DeltaHandle>& deltas, int id,
                               std::size_t n_layers) {
  const auto it = deltas.find(id);
  if (it == deltas.end()) throw LookupError("unknown delta id " + std::to_string(id));
  if (it->second.layers.size() != n_layers) {
    throw ShapeError("delta " + std::to_string(id) + " has " +
                     std::to_string(it->second.layers.size()) + " layers, base has " +
                     std::to_string(n_layers));
  }
  return it->second;
}

std::vector<RequestOutput> to_outputs(const BatchInput& batch, const Matrix& y_cols) {
  std::vector<RequestOutput> out(batch.rows.size());
  for (std::size_t i = 0; i < batch.rows.size(); ++i) {
    out[i].request_id = batch.rows[i].request_id;
    out[i].y.resize(y_cols.rows());
    for (std::size_t r = 0; r < y_cols.rows(); ++r) out[i].y[r] = y_cols(r, i);
  }
  return out;
}

// x_i * w_i for the whole batch plus each delta group's shard product on
// its own rows. x_i is (batch x in_i).
Matrix worker_sbmm(const Matrix& base_shard, const Grouping& g,
                   const std::vector<DeltaShard>& group_shards, const Matrix& x_i) {
  Matrix y = matmul(x_i, base_shard);
  for (std::size_t gi = 0; gi < g.groups.size(); ++gi) {
    const auto& grp = g.groups[gi];
    Matrix rows(grp.end - grp.begin, x_i.cols());
    for (std::size_t k = grp.begin; k < grp.end; ++k) {
      const auto src = x_i.row(g.order[k]);
      std::copy(src.begin(), src.end(), rows.row(k - grp.begin).begin());
    }
    const Matrix part = apply_delta_shard(group_shards[gi], rows);
    for (std::size_t k = grp.begin; k < grp.end; ++k) {
      auto dst = y.row(g.order[k]);
      const auto src = part.row(k - grp.begin);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
    }
  }
  return y;
}

Matrix tp_model(const WeightStack& base, const std::vector<const DeltaHandle*>& handles,
                const Grouping& g, const Matrix& x_rows, const TpLayout& layout) {
  const std::size_t n = layout.n_workers;
  if (layout.axes.size() != base.size()) {
    throw PartitionError("layout covers " + std::to_string(layout.axes.size()) +
                         " layers, stack has " + std::to_string(base.size()));
  }
  Matrix full = x_rows;
  std::vector<Matrix> shards;  // non-empty when activations are split by feature
  for (std::size_t l = 0; l < base.size(); ++l) {
    const ParallelAxis axis = layout.axes[l];
    const auto base_shards = tp_partition(transpose(base[l].weight), axis, n);
    // group_shards[worker][group]
    std::vector<std::vector<DeltaShard>> group_shards(n);
    for (const auto* h : handles) {
      const auto s = tp_partition_delta(h->layers[l], axis, n);
      for (std::size_t w = 0; w < n; ++w) group_shards[w].push_back(s[w]);
    }
    if (axis == ParallelAxis::kColumn) {
      const Matrix in = shards.empty() ? full : hconcat(shards);
      if (in.cols() != base_shards[0].rows()) {
        throw ShapeError("layer '" + base[l].name + "' input width mismatch");
      }
      shards.clear();
      for (std::size_t w = 0; w < n; ++w) {
        shards.push_back(worker_sbmm(base_shards[w], g, group_shards[w], in));
      }
    } else {
      std::vector<Matrix> parts = shards;
      if (parts.empty()) {
        if (full.cols() % n != 0) throw PartitionError("activation width is not divisible");
        const std::size_t step = full.cols() / n;
        for (std::size_t w = 0; w < n; ++w) {
          parts.push_back(slice_cols(full, w * step, (w + 1) * step));
        }
      }
      shards.clear();
      for (std::size_t w = 0; w < n; ++w) {
        if (parts[w].cols() != base_shards[w].rows()) {
          throw ShapeError("layer '" + base[l].name + "' input width mismatch");
        }
        Matrix partial = worker_sbmm(base_shards[w], g, group_shards[w], parts[w]);
        full = w == 0 ? std::move(partial) : full + partial;
      }
    }
    if (l + 1 < base.size()) {
      if (shards.empty()) {
        full = tanh(full);
      } else {
        for (auto& s : shards) s = tanh(s);
      }
    }
  }
  return shards.empty() ? full : hconcat(shards);
}

}  // namespace

std::vector<RequestOutput> forward_model(const WeightStack& base,
                                         const std::map<int, DeltaHandle>& deltas,
                                         const BatchInput& batch,
                                         const std::optional<TpLayout>& layout) {
  if (batch.rows.empty()) return {};
  if (base.empty()) throw ShapeError("forward_model: empty base stack");
  Matrix x = batch_columns(batch);
  if (x.rows() != base.input_dim()) {
    throw ShapeError("forward_model: inputs have width " + std::to_string(x.rows()) +
                     ", model expects " + std::to_string(base.input_dim()));
  }
  std::vector<int> ids;
  for (const auto& r : batch.rows) ids.push_back(r.delta_id);
  const Grouping g = group_by_delta(ids);
  std::vector<const DeltaHandle*> handles;
  for (const auto& grp : g.groups) handles.push_back(&find_handle(deltas, grp.delta_id, base.size()));

  if (layout && layout->n_workers > 1) {
    const Matrix y_rows = tp_model(base, handles, g, transpose(x), *layout);
    return to_outputs(batch, transpose(y_rows));
  }

  for (std::size_t l = 0; l < base.size(); ++l) {
    DeltaLookup lookup;
    for (std::size_t gi = 0; gi < handles.size(); ++gi) {
      lookup.emplace(g.groups[gi].delta_id, &handles[gi]->layers[l]);
    }
    x = sbmm_columns(base[l].weight, lookup, ids, x);
    if (l + 1 < base.size()) x = tanh(x);
  }
  return to_outputs(batch, x);
}

}  // namespace deltazip::inference
