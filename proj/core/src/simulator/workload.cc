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

#include "deltazip/simulator/workload.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "deltazip/errors.h"
#include "deltazip/rng.h"

namespace deltazip::simulator {
namespace {

int sample_length(Rng& rng, double median, const LengthSampler& s) {
  const double v = std::exp(std::log(median) + s.sigma * rng.normal());
  const double clipped = std::clamp(std::nearbyint(v), static_cast<double>(s.min_tokens),
                                    static_cast<double>(s.max_tokens));
  return static_cast<int>(clipped);
}

}  // namespace

void WorkloadSpec::validate() const {
  if (!(rate >= 0.0)) throw ArgumentError("workload: rate must be >= 0");
  if (!(duration >= 0.0)) throw ArgumentError("workload: duration must be >= 0");
  if (n_models < 1) throw ArgumentError("workload: need at least one model");
  if (popularity == Popularity::kZipf && !(zipf_alpha > 0.0)) {
    throw ArgumentError("workload: zipf alpha must be > 0");
  }
  if (popularity == Popularity::kTraceFile && reference_models.empty()) {
    throw ArgumentError("workload: trace popularity needs a non-empty reference trace");
  }
  if (!(lengths.prompt_median > 0.0) || !(lengths.decode_median > 0.0) ||
      !(lengths.sigma >= 0.0) || lengths.min_tokens < 1 ||
      lengths.max_tokens < lengths.min_tokens) {
    throw ArgumentError("workload: bad token-length sampler parameters");
  }
}

std::vector<double> popularity_weights(const WorkloadSpec& spec) {
  spec.validate();
  std::vector<double> w(spec.n_models, 0.0);
  switch (spec.popularity) {
    case Popularity::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case Popularity::kZipf:
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::pow(static_cast<double>(i + 1), -spec.zipf_alpha);
      }
      break;
    case Popularity::kTraceFile:
      for (int m : spec.reference_models) {
        if (m >= 0 && static_cast<std::size_t>(m) < w.size()) w[m] += 1.0;
      }
      break;
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) {
    throw ArgumentError("workload: reference trace uses none of the " +
                        std::to_string(spec.n_models) + " models");
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<TraceEvent> gen_trace(const WorkloadSpec& spec) {
  const std::vector<double> weights = popularity_weights(spec);
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) cdf[i] = acc += weights[i];

  std::vector<TraceEvent> trace;
  if (spec.rate == 0.0) return trace;
  Rng rng(spec.seed);
  double t = 0.0;
  while (true) {
    t += rng.exponential(spec.rate);
    if (t >= spec.duration) break;
    const double u = rng.uniform() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const int model = static_cast<int>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
    TraceEvent e;
    e.arrival_s = t;
    e.model_id = model;
    e.prompt_tokens = sample_length(rng, spec.lengths.prompt_median, spec.lengths);
    e.decode_tokens = sample_length(rng, spec.lengths.decode_median, spec.lengths);
    trace.push_back(e);
  }
  return trace;
}

void write_trace_jsonl(const std::vector<TraceEvent>& trace, std::ostream& out) {
  for (const auto& e : trace) {
    nlohmann::ordered_json j;
    j["arrival_s"] = e.arrival_s;
    j["model"] = e.model_id;
    j["prompt_tokens"] = e.prompt_tokens;
    j["decode_tokens"] = e.decode_tokens;
    out << j.dump() << '\n';
  }
}

std::vector<TraceEvent> read_trace_jsonl(std::istream& in) {
  std::vector<TraceEvent> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      throw TraceError("trace line " + std::to_string(line_no) + ": " + why);
    };
    TraceEvent e;
    try {
      const auto j = nlohmann::json::parse(line);
      e.arrival_s = j.at("arrival_s").get<double>();
      e.model_id = j.at("model").get<int>();
      e.prompt_tokens = j.at("prompt_tokens").get<int>();
      e.decode_tokens = j.at("decode_tokens").get<int>();
    } catch (const nlohmann::json::exception& ex) {
      fail(ex.what());
    }
    if (!std::isfinite(e.arrival_s) || e.arrival_s < 0.0) fail("arrival_s must be finite and >= 0");
    if (e.model_id < 0) fail("model must be >= 0");
    if (e.prompt_tokens < 1 || e.decode_tokens < 1) fail("token counts must be >= 1");
    if (!trace.empty() && e.arrival_s < trace.back().arrival_s) {
      fail("arrival_s decreases");
    }
    trace.push_back(e);
  }
  return trace;
}

std::vector<TraceEvent> parse_trace_jsonl(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_trace_jsonl(in);
}

void apply_popularity(WorkloadSpec& spec, std::string_view dist) {
  if (dist == "uniform") {
    spec.popularity = Popularity::kUniform;
    return;
  }
  if (dist.starts_with("zipf:")) {
    const std::string value(dist.substr(5));
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !(alpha > 0.0)) {
      throw ArgumentError("bad zipf exponent in '" + std::string(dist) + "' (need a number > 0)");
    }
    spec.popularity = Popularity::kZipf;
    spec.zipf_alpha = alpha;
    return;
  }
  if (dist.starts_with("trace:")) {
    const std::string path(dist.substr(6));
    std::ifstream in(path);
    if (!in) throw InputError("cannot open trace '" + path + "'");
    spec.popularity = Popularity::kTraceFile;
    spec.reference_models.clear();
    for (const auto& e : read_trace_jsonl(in)) spec.reference_models.push_back(e.model_id);
    return;
  }
  throw ArgumentError("unknown popularity '" + std::string(dist) +
                      "' (expected uniform, zipf:<alpha> or trace:<path>)");
}

}  // namespace deltazip::simulator
