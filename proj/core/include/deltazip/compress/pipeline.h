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

#include <cstdint>
#include <string>
#include <vector>

#include "deltazip/compress/config.h"
#include "deltazip/compress/layer_delta.h"
#include "deltazip/compress/obs.h"
#include "deltazip/matrix.h"
#include "deltazip/weight_stack.h"

namespace deltazip::compress {

// A full compressed fine-tune, stored against the base model it was built from.
struct CompressedDelta {
  std::string base_model_id;
  std::vector<LayerDelta> layers;
  CompressConfig config;
  std::uint64_t calibration_fingerprint = 0;

  bool operator==(const CompressedDelta&) const = default;
};

struct CompressResult {
  CompressedDelta delta;
  // base + dequantized delta, layer for layer.
  WeightStack reconstructed;
  std::vector<double> proxy_losses;
};

// w_f - w_b. Throws ShapeError on mismatch.
Matrix extract_delta(const Matrix& finetuned, const Matrix& base);

// FNV-1a over the shape and the binary64 bytes of the calibration samples.
std::uint64_t calibration_fingerprint(const Matrix& samples);

// Compresses every layer in order. Layer n is solved against the Hessian of
// its current input X_n, and the next input is produced by the reconstructed
// weight, X_{n+1} = (w_b + delta~) X_n, so later layers see the error the
// earlier ones actually make.
//
// Throws ShapeError if the stacks differ or the calibration width does not
// match layer 0, CalibrationError if some layer input is all zero, and
// NumericError naming the layer if its Hessian is not positive definite.
CompressResult compress_model(const WeightStack& finetuned, const WeightStack& base,
                              const CalibrationSet& calib, const CompressConfig& cfg,
                              std::string base_model_id = "base");

// base + dequantize(delta) for every layer, keeping the base's parallel axes.
WeightStack reconstruct(const WeightStack& base, const CompressedDelta& delta);

}  // namespace deltazip::compress
