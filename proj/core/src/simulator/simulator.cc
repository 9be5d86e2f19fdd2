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

#include "deltazip/simulator/simulator.h"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "deltazip/errors.h"

namespace deltazip::simulator {
namespace {

constexpr double kBytesPerGb = 1e9;

double bytes_for(const SimConfig& cfg, int model) {
  if (static_cast<std::size_t>(model) < cfg.per_model_bytes.size()) {
    return cfg.per_model_bytes[model];
  }
  return cfg.mode == Mode::kDeltaZip ? cfg.delta_bytes : cfg.model_bytes;
}

// Engine time of one step, split the way it is charged to requests.
struct StepCost {
  double loading = 0.0;
  double prefill = 0.0;
  double decode = 0.0;
};

StepCost step_cost(const SimConfig& cfg, const scheduler::SchedulerState& state,
                   const scheduler::BatchDecision& d) {
  const CostModel& c = cfg.cost;
  StepCost out;
  for (int m : d.deltas_to_load) out.loading += bytes_for(cfg, m) / c.swap_bandwidth;

  // Per model: batch size and the longest prompt still to prefill.
  std::map<int, std::size_t> batch_per_model;
  std::map<int, int> prompt_per_model;
  for (auto id : d.batch) {
    const auto& r = state.running().at(id);
    ++batch_per_model[r.model_id];
  }
  for (auto id : d.admitted) {
    const auto& r = state.running().at(id);
    if (r.prefilled) {
      out.loading += c.host_resume_cost;
    } else {
      int& p = prompt_per_model[r.model_id];
      p = std::max(p, r.prompt_tokens);
    }
  }

  if (cfg.mode == Mode::kDeltaZip) {
    int longest = 0;
    for (const auto& [m, p] : prompt_per_model) longest = std::max(longest, p);
    out.prefill = c.prefill_cost * longest;
    double resident_gb = 0.0;
    for (int m : state.loaded_deltas()) resident_gb += bytes_for(cfg, m) / kBytesPerGb;
    const double launch = cfg.grouped_kernel ? c.launch_overhead_sbmm : c.launch_overhead_naive;
    const double groups = static_cast<double>(batch_per_model.size());
    out.decode = c.decode_base + c.decode_per_token * static_cast<double>(d.batch.size()) +
                 c.delta_mem_cost * resident_gb + launch * std::max(0.0, groups - 1.0);
  } else {
    for (const auto& [m, p] : prompt_per_model) out.prefill += c.prefill_cost * p;
    for (const auto& [m, b] : batch_per_model) {
      out.decode += c.decode_base + c.decode_per_token * static_cast<double>(b);
    }
  }
  return out;
}

double mean_of(const std::vector<RequestRecord>& rs, double (*f)(const RequestRecord&)) {
  if (rs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rs) s += f(r);
  return s / static_cast<double>(rs.size());
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::kDeltaZip ? "deltazip" : "scb"; }

Mode parse_mode(std::string_view s) {
  if (s == "deltazip") return Mode::kDeltaZip;
  if (s == "scb" || s == "scb_baseline" || s == "scb-baseline") return Mode::kScbBaseline;
  throw ArgumentError("unknown mode '" + std::string(s) + "' (expected deltazip or scb)");
}

void SimConfig::validate() const {
  scheduler.validate();
  cost.validate();
  if (scb_resident_models < 1) throw ArgumentError("scb_resident_models must be >= 1");
  if (!(delta_bytes >= 0.0) || !(model_bytes >= 0.0)) {
    throw ArgumentError("model and delta sizes must be >= 0");
  }
  for (double b : per_model_bytes) {
    if (!(b >= 0.0)) throw ArgumentError("per-model sizes must be >= 0");
  }
}

Metrics run_sim(const std::vector<TraceEvent>& trace, const SimConfig& cfg) {
  cfg.validate();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& e = trace[i];
    if (i > 0 && e.arrival_s < trace[i - 1].arrival_s) {
      throw TraceError("trace is not sorted by arrival at event " + std::to_string(i));
    }
    if (e.model_id < 0 ||
        (cfg.n_models > 0 && static_cast<std::size_t>(e.model_id) >= cfg.n_models)) {
      throw TraceError("event " + std::to_string(i) + " names unknown model " +
                       std::to_string(e.model_id));
    }
    if (e.prompt_tokens < 1 || e.decode_tokens < 1) {
      throw TraceError("event " + std::to_string(i) + " has a token count below 1");
    }
  }

  scheduler::SchedulerConfig sc = cfg.scheduler;
  if (cfg.mode == Mode::kScbBaseline) {
    sc.max_deltas = cfg.scb_resident_models;
    sc.allow_preemption = false;
  }
  scheduler::SchedulerState state(sc);

  Metrics m;
  m.mode = std::string(to_string(cfg.mode));
  m.requests.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    auto& r = m.requests[i];
    r.id = static_cast<std::int64_t>(i);
    r.model_id = trace[i].model_id;
    r.prompt_tokens = trace[i].prompt_tokens;
    r.decode_tokens = trace[i].decode_tokens;
    r.arrival = trace[i].arrival_s;
  }
  std::vector<bool> got_first(trace.size(), false);

  double now = trace.empty() ? 0.0 : trace.front().arrival_s;
  std::size_t next = 0;
  while (true) {
    while (next < trace.size() && trace[next].arrival_s <= now) {
      scheduler::Request q;
      q.id = static_cast<std::int64_t>(next);
      q.arrival = trace[next].arrival_s;
      q.model_id = trace[next].model_id;
      q.prompt_tokens = trace[next].prompt_tokens;
      q.decode_tokens = trace[next].decode_tokens;
      state.enqueue(q);
      ++next;
    }
    if (state.idle()) {
      if (next == trace.size()) break;
      now = trace[next].arrival_s;
      continue;
    }

    const scheduler::BatchDecision d = select_batch(state);
    const StepCost cost = step_cost(cfg, state, d);
    m.loads += d.deltas_to_load.size();
    ++m.iterations;
    for (auto id : d.batch) {
      auto& rec = m.requests[id];
      rec.loading += cost.loading;
      rec.inference += cost.prefill + cost.decode;
    }
    now += cost.loading + cost.prefill + cost.decode;

    std::vector<std::int64_t> done;
    for (auto id : d.batch) {
      auto& r = state.running_request(id);
      r.prefilled = true;
      r.state = scheduler::RequestState::kDecoding;
      ++r.tokens_emitted;
      if (!got_first[id]) {
        got_first[id] = true;
        m.requests[id].first_token = now;
      }
      if (r.tokens_emitted >= r.decode_tokens) done.push_back(id);
    }
    // Children first, so a child finishing in the same iteration as its
    // parent is retired rather than preempted.
    std::stable_sort(done.begin(), done.end(), [&](std::int64_t a, std::int64_t b) {
      return state.running().at(a).skipped_line && !state.running().at(b).skipped_line;
    });
    for (auto id : done) {
      if (!state.running().contains(id)) continue;
      m.requests[id].finish = now;
      ++m.finished;
      for (const auto& p : on_request_finished(state, id)) {
        ++m.requests[p.id].preemptions;
        ++m.preemptions;
      }
    }
  }

  for (auto& r : m.requests) r.queueing = r.e2e() - r.loading - r.inference;
  if (!m.requests.empty()) {
    double last = 0.0;
    for (const auto& r : m.requests) last = std::max(last, r.finish);
    m.makespan = last - trace.front().arrival_s;
    m.throughput = m.makespan > 0.0 ? static_cast<double>(m.finished) / m.makespan : 0.0;
  }
  m.mean_e2e = mean_of(m.requests, [](const RequestRecord& r) { return r.e2e(); });
  m.mean_ttft = mean_of(m.requests, [](const RequestRecord& r) { return r.ttft(); });
  m.mean_queueing = mean_of(m.requests, [](const RequestRecord& r) { return r.queueing; });
  m.mean_loading = mean_of(m.requests, [](const RequestRecord& r) { return r.loading; });
  m.mean_inference = mean_of(m.requests, [](const RequestRecord& r) { return r.inference; });
  return m;
}

std::vector<double> slo_attainment(const Metrics& metrics, std::span<const double> slo_grid,
                                   SloKind kind) {
  if (metrics.requests.empty()) throw ArgumentError("slo_attainment: no requests");
  std::vector<double> lat;
  lat.reserve(metrics.requests.size());
  for (const auto& r : metrics.requests) lat.push_back(kind == SloKind::kTtft ? r.ttft() : r.e2e());
  std::sort(lat.begin(), lat.end());
  std::vector<double> out;
  out.reserve(slo_grid.size());
  for (double slo : slo_grid) {
    const auto within = std::upper_bound(lat.begin(), lat.end(), slo) - lat.begin();
    out.push_back(static_cast<double>(within) / static_cast<double>(lat.size()));
  }
  return out;
}

std::map<std::size_t, double> sweep_n(const std::vector<TraceEvent>& trace,
                                      const SimConfig& tmpl, std::span<const std::size_t> ns) {
  std::map<std::size_t, double> out;
  for (std::size_t n : ns) {
    if (n < 1) throw ArgumentError("sweep_n: N values must be >= 1");
    SimConfig cfg = tmpl;
    cfg.scheduler.max_deltas = n;
    out[n] = run_sim(trace, cfg).mean_e2e;
  }
  return out;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["mode"] = m.mode;
  j["aggregates"] = {{"requests", m.requests.size()},
                     {"finished", m.finished},
                     {"makespan_s", m.makespan},
                     {"throughput_rps", m.throughput},
                     {"mean_e2e_s", m.mean_e2e},
                     {"mean_ttft_s", m.mean_ttft},
                     {"mean_queueing_s", m.mean_queueing},
                     {"mean_loading_s", m.mean_loading},
                     {"mean_inference_s", m.mean_inference},
                     {"iterations", m.iterations},
                     {"loads", m.loads},
                     {"preemptions", m.preemptions}};
  auto& rs = j["requests"] = nlohmann::ordered_json::array();
  for (const auto& r : m.requests) {
    rs.push_back({{"id", r.id},
                  {"model", r.model_id},
                  {"prompt_tokens", r.prompt_tokens},
                  {"decode_tokens", r.decode_tokens},
                  {"arrival_s", r.arrival},
                  {"first_token_s", r.first_token},
                  {"finish_s", r.finish},
                  {"e2e_s", r.e2e()},
                  {"ttft_s", r.ttft()},
                  {"queueing_s", r.queueing},
                  {"loading_s", r.loading},
                  {"inference_s", r.inference},
                  {"preemptions", r.preemptions}});
  }
  return j.dump(2);
}

Metrics metrics_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Metrics m;
    m.mode = j.at("mode").get<std::string>();
    const auto& a = j.at("aggregates");
    m.finished = a.at("finished").get<std::size_t>();
    m.makespan = a.at("makespan_s").get<double>();
    m.throughput = a.at("throughput_rps").get<double>();
    m.mean_e2e = a.at("mean_e2e_s").get<double>();
    m.mean_ttft = a.at("mean_ttft_s").get<double>();
    m.mean_queueing = a.at("mean_queueing_s").get<double>();
    m.mean_loading = a.at("mean_loading_s").get<double>();
    m.mean_inference = a.at("mean_inference_s").get<double>();
    m.iterations = a.at("iterations").get<std::size_t>();
    m.loads = a.at("loads").get<std::size_t>();
    m.preemptions = a.at("preemptions").get<std::size_t>();
    for (const auto& r : j.at("requests")) {
      RequestRecord rec;
      rec.id = r.at("id").get<std::int64_t>();
      rec.model_id = r.at("model").get<int>();
      rec.prompt_tokens = r.at("prompt_tokens").get<int>();
      rec.decode_tokens = r.at("decode_tokens").get<int>();
      rec.arrival = r.at("arrival_s").get<double>();
      rec.first_token = r.at("first_token_s").get<double>();
      rec.finish = r.at("finish_s").get<double>();
      rec.queueing = r.at("queueing_s").get<double>();
      rec.loading = r.at("loading_s").get<double>();
      rec.inference = r.at("inference_s").get<double>();
      rec.preemptions = r.at("preemptions").get<int>();
      m.requests.push_back(rec);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed metrics JSON: ") + e.what());
  }
}

std::string metrics_to_csv(const Metrics& m) {
  std::ostringstream out;
  out.precision(17);
  out << "id,model,prompt_tokens,decode_tokens,arrival_s,first_token_s,finish_s,e2e_s,ttft_s,"
         "queueing_s,loading_s,inference_s,preemptions\n";
  for (const auto& r : m.requests) {
    out << r.id << ',' << r.model_id << ',' << r.prompt_tokens << ',' << r.decode_tokens << ','
        << r.arrival << ',' << r.first_token << ',' << r.finish << ',' << r.e2e() << ','
        << r.ttft() << ',' << r.queueing << ',' << r.loading << ',' << r.inference << ','
        << r.preemptions << '\n';
  }
  return out.str();
}

}  // namespace deltazip::simulator
