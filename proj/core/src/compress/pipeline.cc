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

#include "deltazip/compress/pipeline.h"

#include <bit>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::compress {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= kFnvPrime;
  }
}

bool all_zero(const Matrix& m) {
  for (double v : m.data()) {
    if (v != 0.0) return false;
  }
  return true;
}

}  // namespace

Matrix extract_delta(const Matrix& finetuned, const Matrix& base) {
  if (!finetuned.same_shape(base)) {
    throw ShapeError("extract_delta: fine-tuned is " + std::to_string(finetuned.rows()) + "x" +
                     std::to_string(finetuned.cols()) + ", base is " +
                     std::to_string(base.rows()) + "x" + std::to_string(base.cols()));
  }
  return finetuned - base;
}

std::uint64_t calibration_fingerprint(const Matrix& samples) {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, samples.rows());
  fnv_mix(h, samples.cols());
  for (double v : samples.data()) fnv_mix(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

CompressResult compress_model(const WeightStack& finetuned, const WeightStack& base,
                              const CalibrationSet& calib, const CompressConfig& cfg,
                              std::string base_model_id) {
  cfg.validate();
  if (base.empty()) throw ShapeError("compress_model: empty weight stack");
  if (!finetuned.same_structure(base)) {
    throw ShapeError("compress_model: fine-tuned and base stacks differ in names or shapes");
  }
  if (calib.input_dim() != base.input_dim()) {
    throw ShapeError("compress_model: calibration width " + std::to_string(calib.input_dim()) +
                     " does not match layer 0 input width " + std::to_string(base.input_dim()));
  }

  CompressResult out;
  out.delta.base_model_id = std::move(base_model_id);
  out.delta.config = cfg;
  out.delta.calibration_fingerprint = calibration_fingerprint(calib.samples);

  Matrix x = calib.samples;
  for (const auto& layer : base.layers()) {
    const Layer& tuned = finetuned[out.delta.layers.size()];
    if (all_zero(x)) {
      throw CalibrationError("layer '" + layer.name + "': calibration input is all zero");
    }
    const Matrix delta = extract_delta(tuned.weight, layer.weight);
    const Matrix hessian = compute_hessian(x, cfg.damping);
    LayerCompression lc = obs_compress_layer(layer.name, delta, hessian, cfg);
    Matrix merged = layer.weight + dequantize(lc.delta);
    x = matmul(merged, x);
    out.reconstructed.add_layer(layer.name, std::move(merged), layer.axis);
    out.proxy_losses.push_back(lc.proxy_loss);
    out.delta.layers.push_back(std::move(lc.delta));
  }
  return out;
}

WeightStack reconstruct(const WeightStack& base, const CompressedDelta& delta) {
  if (base.size() != delta.layers.size()) {
    throw ShapeError("reconstruct: base has " + std::to_string(base.size()) +
                     " layers, delta has " + std::to_string(delta.layers.size()));
  }
  WeightStack out;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const LayerDelta& d = delta.layers[i];
    if (d.rows != base[i].weight.rows() || d.cols != base[i].weight.cols()) {
      throw ShapeError("reconstruct: layer '" + d.name + "' shape differs from the base");
    }
    out.add_layer(base[i].name, base[i].weight + dequantize(d), base[i].axis);
  }
  return out;
}

}  // namespace deltazip::compress
