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
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace deltazip::simulator {

struct TraceEvent {
  double arrival_s = 0.0;
  int model_id = 0;
  int prompt_tokens = 1;
  int decode_tokens = 1;

  bool operator==(const TraceEvent&) const = default;
};

enum class Popularity { kUniform, kZipf, kTraceFile };

// Log-normal token counts, rounded and clipped to [min_tokens, max_tokens].
struct LengthSampler {
  double prompt_median = 100.0;
  double decode_median = 150.0;
  double sigma = 0.6;
  int min_tokens = 1;
  int max_tokens = 2048;
};

struct WorkloadSpec {
  std::size_t n_models = 32;
  double rate = 0.5;        // Poisson arrivals per second
  double duration = 300.0;  // seconds
  Popularity popularity = Popularity::kZipf;
  double zipf_alpha = 1.5;
  // Empirical model ids for kTraceFile; model i is drawn with the frequency
  // it has here.
  std::vector<int> reference_models;
  LengthSampler lengths;
  std::uint64_t seed = 0;

  // Throws ArgumentError.
  void validate() const;
};

// Probability of each model id 0..n_models-1. Zipf gives model i weight
// 1/(i+1)^alpha.
std::vector<double> popularity_weights(const WorkloadSpec& spec);

// Exponential inter-arrivals with mean 1/rate until duration, model ids
// i.i.d. from the popularity law, log-normal lengths. Pure in the spec.
std::vector<TraceEvent> gen_trace(const WorkloadSpec& spec);

// One JSON object per line: {"arrival_s", "model", "prompt_tokens", "decode_tokens"}.
void write_trace_jsonl(const std::vector<TraceEvent>& trace, std::ostream& out);
// Throws TraceError naming the line for malformed JSON, missing fields,
// token counts below 1, negative models or decreasing arrivals.
std::vector<TraceEvent> read_trace_jsonl(std::istream& in);
std::vector<TraceEvent> parse_trace_jsonl(std::string_view text);

// "uniform", "zipf:<alpha>" or "trace:<path>" (the latter fills
// reference_models from a JSONL trace). Throws ArgumentError.
void apply_popularity(WorkloadSpec& spec, std::string_view dist);

}  // namespace deltazip::simulator
