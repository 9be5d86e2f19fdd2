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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "deltazip/matrix.h"
#include "deltazip/weight_stack.h"

namespace deltazip::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumeric = 2;

// Paired synthetic models: base weights ~ N(0, 1/in_dim), finetuned = base +
// a delta whose stddev is delta_ratio times the base stddev. Calibration
// inputs are correlated through a few shared latent factors. All values are
// f32-representable so they survive the DZWT container unchanged.
struct SyntheticModelSpec {
  std::size_t layers = 8;
  std::size_t dim = 256;
  std::size_t samples = 128;
  double delta_ratio = 0.02;
  std::uint64_t seed = 0;
};

struct SyntheticModel {
  WeightStack base;
  WeightStack finetuned;
  Matrix calibration{1, 1};  // dim x samples
};

SyntheticModel make_synthetic_model(const SyntheticModelSpec& spec);

// Runs one command line (argv[0] is the program name). Never throws; library
// errors are reported on err and mapped to the exit codes above.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace deltazip::cli
