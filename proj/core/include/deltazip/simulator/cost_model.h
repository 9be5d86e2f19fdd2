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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deltazip::simulator {

// Timing model of one serving engine. All values are seconds unless noted.
struct CostModel {
  double swap_bandwidth = 6.25e9;      // bytes/s host-to-GPU (50 Gbps)
  double prefill_cost = 2e-4;          // per prompt token
  double decode_base = 5e-3;           // fixed per decode iteration
  double decode_per_token = 2e-5;      // per request in the iteration
  double delta_mem_cost = 2e-3;        // per iteration per GB (1e9 bytes) of resident deltas
  double launch_overhead_sbmm = 1e-4;  // per extra delta group, grouped kernel
  double launch_overhead_naive = 1e-3; // per extra delta group, one kernel per delta
  double host_resume_cost = 2e-2;      // per preempted request brought back

  // Throws ArgumentError on a negative value or a zero bandwidth.
  void validate() const;

  // Sets one constant by name (the field names above). Throws ArgumentError
  // for an unknown key or a value that does not parse.
  void set(std::string_view key, std::string_view value);

  std::vector<std::pair<std::string, double>> entries() const;
};

// Applies "key = value" lines; blank lines and '#' comments are ignored.
// Throws ArgumentError naming the offending line.
CostModel parse_cost_overrides(std::string_view text, CostModel base = {});

}  // namespace deltazip::simulator
