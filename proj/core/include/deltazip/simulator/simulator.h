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
#include <string>
#include <string_view>
#include <vector>

#include "deltazip/scheduler/scheduler.h"
#include "deltazip/simulator/cost_model.h"
#include "deltazip/simulator/workload.h"

namespace deltazip::simulator {

enum class Mode {
  // Compressed deltas over a shared base, mixed-delta batches.
  kDeltaZip,
  // Whole fp16 models swapped in and out; each resident model decodes its
  // own batch.
  kScbBaseline,
};

std::string_view to_string(Mode m);
// "deltazip" or "scb". Throws ArgumentError.
Mode parse_mode(std::string_view s);

struct SimConfig {
  Mode mode = Mode::kDeltaZip;
  // K and N. In baseline mode N is overridden by scb_resident_models and
  // preemption is off.
  scheduler::SchedulerConfig scheduler;
  CostModel cost;
  // Grouped multi-delta kernel (SBMM launch rate) vs one launch per delta.
  bool grouped_kernel = true;
  std::size_t scb_resident_models = 2;
  double delta_bytes = 5e9;   // per compressed delta
  double model_bytes = 26e9;  // per full fp16 model
  // Optional per-model override of delta_bytes (deltazip) or model_bytes
  // (baseline), indexed by model id.
  std::vector<double> per_model_bytes;
  // Models outside [0, n_models) are trace errors. 0 disables the check.
  std::size_t n_models = 0;

  // Throws ArgumentError.
  void validate() const;
};

struct RequestRecord {
  std::int64_t id = 0;
  int model_id = 0;
  int prompt_tokens = 0;
  int decode_tokens = 0;
  double arrival = 0.0;
  double first_token = 0.0;
  double finish = 0.0;
  // Breakdown of e2e: waiting outside the batch, stalled on loads (and
  // preemption resumes), and prefill/decode work.
  double queueing = 0.0;
  double loading = 0.0;
  double inference = 0.0;
  int preemptions = 0;

  double e2e() const { return finish - arrival; }
  double ttft() const { return first_token - arrival; }
  bool operator==(const RequestRecord&) const = default;
};

struct Metrics {
  std::string mode;
  std::vector<RequestRecord> requests;  // in trace order
  std::size_t finished = 0;
  double makespan = 0.0;    // last finish - first arrival
  double throughput = 0.0;  // finished / makespan
  double mean_e2e = 0.0;
  double mean_ttft = 0.0;
  double mean_queueing = 0.0;
  double mean_loading = 0.0;
  double mean_inference = 0.0;
  std::size_t iterations = 0;
  std::size_t loads = 0;
  std::size_t preemptions = 0;

  bool operator==(const Metrics&) const = default;
};

// Replays the trace through the scheduler and cost model. Each engine step
// admits arrivals, selects a batch, loads what it needs (synchronously),
// prefills newly admitted prompts and runs one decode iteration that emits
// one token per running request.
//
// Throws TraceError for an unsorted trace or an unknown model id.
Metrics run_sim(const std::vector<TraceEvent>& trace, const SimConfig& cfg);

enum class SloKind { kTtft, kE2e };

// Fraction of requests whose latency is <= each threshold. Throws
// ArgumentError when metrics hold no requests.
std::vector<double> slo_attainment(const Metrics& metrics, std::span<const double> slo_grid,
                                   SloKind kind);

// Mean e2e latency for each N (the template's N is replaced).
std::map<std::size_t, double> sweep_n(const std::vector<TraceEvent>& trace,
                                      const SimConfig& tmpl, std::span<const std::size_t> ns);

// JSON with "mode", "aggregates" and "requests"; CSV with one row per request.
std::string metrics_to_json(const Metrics& m);
// Throws ArgumentError on malformed input.
Metrics metrics_from_json(std::string_view text);
std::string metrics_to_csv(const Metrics& m);

}  // namespace deltazip::simulator
