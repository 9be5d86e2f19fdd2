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

#include "deltazip/simulator/cost_model.h"

#include <charconv>
#include <string>

#include "deltazip/errors.h"

namespace deltazip::simulator {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double* field(CostModel& c, std::string_view key) {
  if (key == "swap_bandwidth") return &c.swap_bandwidth;
  if (key == "prefill_cost") return &c.prefill_cost;
  if (key == "decode_base") return &c.decode_base;
  if (key == "decode_per_token") return &c.decode_per_token;
  if (key == "delta_mem_cost") return &c.delta_mem_cost;
  if (key == "launch_overhead_sbmm") return &c.launch_overhead_sbmm;
  if (key == "launch_overhead_naive") return &c.launch_overhead_naive;
  if (key == "host_resume_cost") return &c.host_resume_cost;
  return nullptr;
}

}  // namespace

void CostModel::validate() const {
  for (const auto& [name, v] : entries()) {
    if (!(v >= 0.0)) throw ArgumentError("cost model: " + name + " must be >= 0");
  }
  if (!(swap_bandwidth > 0.0)) throw ArgumentError("cost model: swap_bandwidth must be > 0");
}

void CostModel::set(std::string_view key, std::string_view value) {
  double* slot = field(*this, trim(key));
  if (slot == nullptr) throw ArgumentError("cost model: unknown key '" + std::string(key) + "'");
  const std::string_view v = trim(value);
  double parsed = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
  if (ec != std::errc() || end != v.data() + v.size()) {
    throw ArgumentError("cost model: bad value '" + std::string(value) + "' for " +
                        std::string(key));
  }
  *slot = parsed;
}

std::vector<std::pair<std::string, double>> CostModel::entries() const {
  return {{"swap_bandwidth", swap_bandwidth},
          {"prefill_cost", prefill_cost},
          {"decode_base", decode_base},
          {"decode_per_token", decode_per_token},
          {"delta_mem_cost", delta_mem_cost},
          {"launch_overhead_sbmm", launch_overhead_sbmm},
          {"launch_overhead_naive", launch_overhead_naive},
          {"host_resume_cost", host_resume_cost}};
}

CostModel parse_cost_overrides(std::string_view text, CostModel base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ArgumentError("cost config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      base.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ArgumentError("cost config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

}  // namespace deltazip::simulator
