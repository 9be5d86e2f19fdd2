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

#include "deltazip/inference/sbmm.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::inference {

DeltaHandle make_delta_handle(int delta_id, compress::CompressedDelta delta,
                              const WeightStack& base) {
  if (delta.layers.size() != base.size()) {
    throw ShapeError("delta " + std::to_string(delta_id) + " has " +
                     std::to_string(delta.layers.size()) + " layers, base has " +
                     std::to_string(base.size()));
  }
  for (std::size_t i = 0; i < base.size(); ++i) {
    const auto& d = delta.layers[i];
    if (d.rows != base[i].weight.rows() || d.cols != base[i].weight.cols()) {
      throw ShapeError("delta " + std::to_string(delta_id) + " layer '" + d.name +
                       "' does not match base layer '" + base[i].name + "'");
    }
  }
  return DeltaHandle{delta_id, std::move(delta.layers)};
}

Matrix decoupled_linear(const Matrix& w_base, const LayerDelta& delta, const Matrix& x) {
  if (delta.rows != w_base.rows() || delta.cols != w_base.cols()) {
    throw ShapeError("decoupled_linear: delta '" + delta.name + "' is " +
                     std::to_string(delta.rows) + "x" + std::to_string(delta.cols) +
                     ", base is " + std::to_string(w_base.rows()) + "x" +
                     std::to_string(w_base.cols()));
  }
  return matmul(w_base, x) + compress::apply_delta(delta, x);
}

Grouping group_by_delta(std::span<const int> delta_ids) {
  Grouping g;
  g.order.resize(delta_ids.size());
  std::iota(g.order.begin(), g.order.end(), std::size_t{0});
  std::stable_sort(g.order.begin(), g.order.end(),
                   [&](std::size_t a, std::size_t b) { return delta_ids[a] < delta_ids[b]; });
  g.position.resize(delta_ids.size());
  for (std::size_t k = 0; k < g.order.size(); ++k) {
    g.position[g.order[k]] = k;
    const int id = delta_ids[g.order[k]];
    if (g.groups.empty() || g.groups.back().delta_id != id) {
      g.groups.push_back(DeltaGroup{id, k, k});
    }
    g.groups.back().end = k + 1;
  }
  return g;
}

Grouping group_by_delta(const BatchInput& batch) {
  std::vector<int> ids;
  ids.reserve(batch.rows.size());
  for (const auto& r : batch.rows) ids.push_back(r.delta_id);
  return group_by_delta(ids);
}

Matrix sbmm_columns(const Matrix& base_layer, const DeltaLookup& deltas,
                    std::span<const int> delta_ids, const Matrix& x) {
  if (delta_ids.size() != x.cols()) {
    throw ShapeError("sbmm: " + std::to_string(delta_ids.size()) + " delta ids for " +
                     std::to_string(x.cols()) + " input columns");
  }
  if (x.rows() != base_layer.cols()) {
    throw ShapeError("sbmm: base layer expects " + std::to_string(base_layer.cols()) +
                     " inputs, got " + std::to_string(x.rows()));
  }
  const Grouping g = group_by_delta(delta_ids);
  std::vector<const LayerDelta*> group_delta;
  group_delta.reserve(g.groups.size());
  for (const auto& grp : g.groups) {
    const auto it = deltas.find(grp.delta_id);
    if (it == deltas.end() || it->second == nullptr) {
      throw LookupError("sbmm: unknown delta id " + std::to_string(grp.delta_id));
    }
    const LayerDelta& d = *it->second;
    if (d.rows != base_layer.rows() || d.cols != base_layer.cols()) {
      throw ShapeError("sbmm: delta " + std::to_string(grp.delta_id) +
                       " does not match the base layer shape");
    }
    group_delta.push_back(&d);
  }

  const std::size_t in = x.rows();
  const std::size_t batch = x.cols();
  Matrix sorted(in, batch);
  for (std::size_t r = 0; r < in; ++r) {
    for (std::size_t k = 0; k < batch; ++k) sorted(r, k) = x(r, g.order[k]);
  }

  Matrix y = matmul(base_layer, sorted);
  for (std::size_t gi = 0; gi < g.groups.size(); ++gi) {
    const auto& grp = g.groups[gi];
    const Matrix part =
        compress::apply_delta(*group_delta[gi], slice_cols(sorted, grp.begin, grp.end));
    for (std::size_t r = 0; r < y.rows(); ++r) {
      for (std::size_t k = grp.begin; k < grp.end; ++k) y(r, k) += part(r, k - grp.begin);
    }
  }

  Matrix out(y.rows(), batch);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t i = 0; i < batch; ++i) out(r, i) = y(r, g.position[i]);
  }
  return out;
}

Matrix batch_columns(const BatchInput& batch) {
  if (batch.rows.empty()) throw ShapeError("empty batch");
  const std::size_t in = batch.rows.front().x.size();
  Matrix x(in, batch.rows.size());
  for (std::size_t i = 0; i < batch.rows.size(); ++i) {
    const auto& v = batch.rows[i].x;
    if (v.size() != in) {
      throw ShapeError("request " + std::to_string(batch.rows[i].request_id) + " has input width " +
                       std::to_string(v.size()) + ", expected " + std::to_string(in));
    }
    for (std::size_t r = 0; r < in; ++r) x(r, i) = v[r];
  }
  return x;
}

std::vector<RequestOutput> sbmm(const Matrix& base_layer, const DeltaLookup& deltas,
                                const BatchInput& batch) {
  if (batch.rows.empty()) return {};
  std::vector<int> ids;
  ids.reserve(batch.rows.size());
  for (const auto& r : batch.rows) ids.push_back(r.delta_id);
  const Matrix y = sbmm_columns(base_layer, deltas, ids, batch_columns(batch));
  std::vector<RequestOutput> out(batch.rows.size());
  for (std::size_t i = 0; i < batch.rows.size(); ++i) {
    out[i].request_id = batch.rows[i].request_id;
    out[i].y.resize(y.rows());
    for (std::size_t r = 0; r < y.rows(); ++r) out[i].y[r] = y(r, i);
  }
  return out;
}

std::vector<RequestOutput> sbmm(const Matrix& base_layer,
                                const std::map<int, LayerDelta>& deltas,
                                const BatchInput& batch) {
  DeltaLookup lookup;
  for (const auto& [id, d] : deltas) lookup.emplace(id, &d);
  return sbmm(base_layer, lookup, batch);
}

}  // namespace deltazip::inference
