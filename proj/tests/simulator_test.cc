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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deltazip/errors.h"
#include "deltazip/rng.h"
#include "deltazip/scheduler/scheduler.h"
#include "deltazip/simulator/cost_model.h"
#include "deltazip/simulator/simulator.h"
#include "deltazip/simulator/workload.h"

namespace deltazip::simulator {
namespace {

TraceEvent ev(double t, int model, int prompt, int decode) {
  return TraceEvent{t, model, prompt, decode};
}

std::vector<TraceEvent> random_trace(std::uint64_t seed, std::size_t n, int models) {
  Rng rng(seed);
  std::vector<TraceEvent> out;
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += rng.exponential(1.5);
    out.push_back(ev(t, static_cast<int>(rng.uniform() * models), 1 + static_cast<int>(rng.uniform() * 60),
                     1 + static_cast<int>(rng.uniform() * 40)));
  }
  return out;
}

// ---- workload -------------------------------------------------------------

TEST(GenTrace, ZeroRateIsEmpty) {
  WorkloadSpec s;
  s.rate = 0.0;
  EXPECT_TRUE(gen_trace(s).empty());
}

TEST(GenTrace, NegativeRateRejected) {
  WorkloadSpec s;
  s.rate = -1.0;
  EXPECT_THROW(gen_trace(s), ArgumentError);
  s.rate = 1.0;
  s.zipf_alpha = 0.0;
  EXPECT_THROW(gen_trace(s), ArgumentError);
}

TEST(GenTrace, TwoModelZipfWeights) {
  WorkloadSpec s;
  s.n_models = 2;
  s.zipf_alpha = 1.5;
  const auto w = popularity_weights(s);
  ASSERT_EQ(w.size(), 2u);
  // 1 / (1 + 2^-1.5), by hand.
  const double expected = 1.0 / (1.0 + 1.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_NEAR(w[0], expected, 1e-12);
  EXPECT_NEAR(w[0], 0.7388, 5e-5);

  s.rate = 50.0;
  s.duration = 400.0;
  s.seed = 11;
  const auto trace = gen_trace(s);
  const double zeros = static_cast<double>(std::count_if(
      trace.begin(), trace.end(), [](const TraceEvent& e) { return e.model_id == 0; }));
  const double n = static_cast<double>(trace.size());
  EXPECT_NEAR(zeros / n, expected, 4.0 * std::sqrt(expected * (1 - expected) / n));
}

TEST(GenTrace, UniformWeightsAreFlat) {
  WorkloadSpec s;
  s.n_models = 8;
  s.popularity = Popularity::kUniform;
  for (double p : popularity_weights(s)) EXPECT_DOUBLE_EQ(p, 0.125);
}

TEST(GenTrace, DeterministicPerSeed) {
  WorkloadSpec s;
  s.seed = 5;
  EXPECT_EQ(gen_trace(s), gen_trace(s));
  WorkloadSpec other = s;
  other.seed = 6;
  EXPECT_NE(gen_trace(s), gen_trace(other));
}

TEST(GenTrace, ArrivalsAndLengthsWellFormed) {
  WorkloadSpec s;
  s.rate = 4.0;
  s.duration = 500.0;
  s.seed = 3;
  const auto trace = gen_trace(s);
  ASSERT_GT(trace.size(), 1000u);
  double prev = 0.0;
  for (const auto& e : trace) {
    EXPECT_GE(e.arrival_s, prev);
    EXPECT_LT(e.arrival_s, s.duration);
    EXPECT_GE(e.model_id, 0);
    EXPECT_LT(e.model_id, 32);
    EXPECT_GE(e.prompt_tokens, 1);
    EXPECT_LE(e.prompt_tokens, 2048);
    EXPECT_GE(e.decode_tokens, 1);
    EXPECT_LE(e.decode_tokens, 2048);
    prev = e.arrival_s;
  }
  // Poisson count over 500 s at rate 4: mean 2000, sd ~45.
  EXPECT_NEAR(static_cast<double>(trace.size()), 2000.0, 6.0 * std::sqrt(2000.0));
  std::vector<int> prompts;
  for (const auto& e : trace) prompts.push_back(e.prompt_tokens);
  std::nth_element(prompts.begin(), prompts.begin() + prompts.size() / 2, prompts.end());
  EXPECT_NEAR(prompts[prompts.size() / 2], 100.0, 8.0);
}

TEST(GenTrace, TraceFilePopularityFollowsReference) {
  WorkloadSpec s;
  s.n_models = 4;
  s.popularity = Popularity::kTraceFile;
  s.reference_models = {3, 3, 3, 1};
  const auto w = popularity_weights(s);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_DOUBLE_EQ(w[1], 0.25);
  EXPECT_DOUBLE_EQ(w[3], 0.75);
}

TEST(TraceJsonl, RoundTrip) {
  WorkloadSpec s;
  s.seed = 9;
  s.duration = 60.0;
  const auto trace = gen_trace(s);
  std::ostringstream out;
  write_trace_jsonl(trace, out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_trace_jsonl(in), trace);
}

TEST(TraceJsonl, ReportsBadLine) {
  const std::string good = R"({"arrival_s": 0.5, "model": 1, "prompt_tokens": 3, "decode_tokens": 4})";
  EXPECT_EQ(parse_trace_jsonl(good + "\n\n").size(), 1u);
  const std::vector<std::string> bad = {
      R"({"arrival_s": 0.5, "model": 1, "prompt_tokens": 0, "decode_tokens": 4})",
      R"({"arrival_s": 0.5, "model": -1, "prompt_tokens": 3, "decode_tokens": 4})",
      R"({"arrival_s": 0.1, "model": 1, "prompt_tokens": 3, "decode_tokens": 4})",
      R"({"arrival_s": 0.9, "model": 1, "prompt_tokens": 3})",
      R"({"arrival_s": 0.9, "model": 1,)",
  };
  for (const auto& line : bad) {
    try {
      parse_trace_jsonl(good + "\n" + line + "\n");
      ADD_FAILURE() << line;
    } catch (const TraceError& e) {
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(ApplyPopularity, ParsesDistributions) {
  WorkloadSpec s;
  apply_popularity(s, "uniform");
  EXPECT_EQ(s.popularity, Popularity::kUniform);
  apply_popularity(s, "zipf:4.0");
  EXPECT_EQ(s.popularity, Popularity::kZipf);
  EXPECT_DOUBLE_EQ(s.zipf_alpha, 4.0);
  EXPECT_THROW(apply_popularity(s, "zipf:-1"), ArgumentError);
  EXPECT_THROW(apply_popularity(s, "zipf:x"), ArgumentError);
  EXPECT_THROW(apply_popularity(s, "pareto"), ArgumentError);
}

// ---- cost model -----------------------------------------------------------

TEST(CostModel, OverridesAndValidation) {
  const CostModel c = parse_cost_overrides("# comment\nprefill_cost = 1e-3\n\n decode_base=0.01\n");
  EXPECT_DOUBLE_EQ(c.prefill_cost, 1e-3);
  EXPECT_DOUBLE_EQ(c.decode_base, 0.01);
  EXPECT_DOUBLE_EQ(c.swap_bandwidth, 6.25e9);
  EXPECT_THROW(parse_cost_overrides("bogus = 1"), ArgumentError);
  EXPECT_THROW(parse_cost_overrides("prefill_cost = abc"), ArgumentError);
  EXPECT_THROW(parse_cost_overrides("prefill_cost = -1"), ArgumentError);
  EXPECT_THROW(parse_cost_overrides("swap_bandwidth = 0"), ArgumentError);
  EXPECT_EQ(CostModel{}.entries().size(), 8u);
}

// ---- run_sim --------------------------------------------------------------

TEST(RunSim, SingleRequestClosedForm) {
  SimConfig cfg;
  cfg.delta_bytes = 1e9;
  const auto m = run_sim({ev(2.0, 0, 100, 10)}, cfg);
  // 1 GB / 6.25 GB/s + 100 prompt tokens + 10 decode iterations of
  // (base + one token + 1 GB resident), no extra groups.
  const double load = 1e9 / 6.25e9;
  const double prefill = 100 * 2e-4;
  const double decode = 10 * (5e-3 + 2e-5 + 2e-3 * 1.0);
  ASSERT_EQ(m.requests.size(), 1u);
  const auto& r = m.requests[0];
  EXPECT_NEAR(r.e2e(), load + prefill + decode, 1e-12);
  EXPECT_NEAR(r.e2e(), 0.2502, 1e-12);
  EXPECT_NEAR(r.ttft(), load + prefill + (5e-3 + 2e-5 + 2e-3), 1e-12);
  EXPECT_NEAR(r.loading, load, 1e-12);
  EXPECT_NEAR(r.inference, prefill + decode, 1e-12);
  EXPECT_NEAR(r.queueing, 0.0, 1e-12);
  EXPECT_EQ(m.finished, 1u);
  EXPECT_NEAR(m.throughput, 1.0 / 0.2502, 1e-9);
}

TEST(RunSim, SingleRequestBaselineClosedForm) {
  SimConfig cfg;
  cfg.mode = Mode::kScbBaseline;
  const auto m = run_sim({ev(0.0, 3, 100, 10)}, cfg);
  EXPECT_NEAR(m.requests[0].e2e(), 26e9 / 6.25e9 + 100 * 2e-4 + 10 * (5e-3 + 2e-5), 1e-12);
}

TEST(RunSim, EmptyTrace) {
  const auto m = run_sim({}, SimConfig{});
  EXPECT_TRUE(m.requests.empty());
  EXPECT_EQ(m.finished, 0u);
  EXPECT_EQ(m.throughput, 0.0);
  EXPECT_EQ(m.mean_e2e, 0.0);
}

TEST(RunSim, Deterministic) {
  WorkloadSpec s;
  s.seed = 21;
  const auto trace = gen_trace(s);
  SimConfig cfg;
  EXPECT_EQ(run_sim(trace, cfg), run_sim(trace, cfg));
  cfg.mode = Mode::kScbBaseline;
  EXPECT_EQ(run_sim(trace, cfg), run_sim(trace, cfg));
}

TEST(RunSim, RejectsBadTraces) {
  SimConfig cfg;
  cfg.n_models = 4;
  EXPECT_THROW(run_sim({ev(0, 4, 1, 1)}, cfg), TraceError);
  EXPECT_THROW(run_sim({ev(0, -1, 1, 1)}, cfg), TraceError);
  EXPECT_THROW(run_sim({ev(1, 0, 1, 1), ev(0.5, 0, 1, 1)}, cfg), TraceError);
  EXPECT_THROW(run_sim({ev(0, 0, 0, 1)}, cfg), TraceError);
}

TEST(RunSim, SameDeltaRequestsShareOneLoad) {
  SimConfig cfg;
  const auto m = run_sim({ev(0, 0, 10, 5), ev(0, 0, 10, 5), ev(0, 0, 10, 5)}, cfg);
  EXPECT_EQ(m.loads, 1u);
  EXPECT_EQ(m.iterations, 5u);
  EXPECT_DOUBLE_EQ(m.requests[0].finish, m.requests[2].finish);
}

TEST(RunSim, GroupedKernelBeatsPerDeltaLaunches) {
  const auto trace = random_trace(4, 300, 6);
  SimConfig cfg;
  cfg.n_models = 6;
  const auto grouped = run_sim(trace, cfg);
  cfg.grouped_kernel = false;
  const auto naive = run_sim(trace, cfg);
  EXPECT_LT(grouped.mean_e2e, naive.mean_e2e);
}

TEST(RunSim, PerModelBytesOverrideDefault) {
  SimConfig cfg;
  cfg.per_model_bytes = {2e9};
  const auto m = run_sim({ev(0, 0, 1, 1)}, cfg);
  EXPECT_NEAR(m.requests[0].loading, 2e9 / 6.25e9, 1e-15);
}

// Conservation, liveness and breakdown consistency over random traces in
// both modes, with and without preemption.
TEST(RunSim, PropertiesOverRandomTraces) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto trace = random_trace(seed, 80, 1 + static_cast<int>(seed % 7));
    for (Mode mode : {Mode::kDeltaZip, Mode::kScbBaseline}) {
      SimConfig cfg;
      cfg.mode = mode;
      cfg.scheduler.max_requests = 1 + seed % 8;
      cfg.scheduler.max_deltas = 1 + seed % 4;
      cfg.scheduler.allow_preemption = seed % 3 != 0;
      cfg.delta_bytes = 5e8;
      const auto m = run_sim(trace, cfg);
      ASSERT_EQ(m.finished, trace.size()) << seed;
      double last = 0.0;
      for (const auto& r : m.requests) {
        EXPECT_GE(r.ttft(), 0.0);
        EXPECT_GE(r.e2e(), r.ttft());
        EXPECT_GE(r.queueing, -1e-9);
        EXPECT_GE(r.loading, 0.0);
        EXPECT_GT(r.inference, 0.0);
        EXPECT_NEAR(r.queueing + r.loading + r.inference, r.e2e(), 1e-9);
        last = std::max(last, r.finish);
      }
      EXPECT_DOUBLE_EQ(m.makespan, last - trace.front().arrival_s);
      EXPECT_DOUBLE_EQ(m.throughput, static_cast<double>(m.finished) / m.makespan);
      if (mode == Mode::kScbBaseline) EXPECT_EQ(m.preemptions, 0u);
    }
  }
}

// A request arriving at an idle engine starts immediately.
TEST(RunSim, NoIdlingWithWorkAvailable) {
  SimConfig cfg;
  const auto m = run_sim({ev(0, 0, 5, 3), ev(100, 1, 5, 3)}, cfg);
  EXPECT_NEAR(m.requests[1].queueing, 0.0, 1e-12);
}

// ---- slo_attainment -------------------------------------------------------

TEST(SloAttainment, Examples) {
  Metrics m;
  for (int i = 0; i < 4; ++i) {
    RequestRecord r;
    r.arrival = 0.0;
    r.first_token = 0.25;
    r.finish = 1.0;
    m.requests.push_back(r);
  }
  const std::vector<double> grid = {0.5, 2.0};
  EXPECT_EQ(slo_attainment(m, grid, SloKind::kE2e), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(slo_attainment(m, grid, SloKind::kTtft), (std::vector<double>{1.0, 1.0}));
  EXPECT_THROW(slo_attainment(Metrics{}, grid, SloKind::kE2e), ArgumentError);
}

TEST(SloAttainment, MatchesCountingOracleAndIsMonotone) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Metrics m;
    for (int i = 0; i < 50; ++i) {
      RequestRecord r;
      r.arrival = rng.uniform();
      r.first_token = r.arrival + rng.uniform();
      r.finish = r.first_token + 3 * rng.uniform();
      m.requests.push_back(r);
    }
    std::vector<double> grid;
    for (int g = 0; g <= 20; ++g) grid.push_back(0.2 * g);
    const auto curve = slo_attainment(m, grid, SloKind::kE2e);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      int count = 0;
      for (const auto& r : m.requests) count += (r.finish - r.arrival) <= grid[g] ? 1 : 0;
      EXPECT_DOUBLE_EQ(curve[g], count / 50.0);
      if (g > 0) EXPECT_GE(curve[g], curve[g - 1]);
    }
  }
}

// ---- sweep_n --------------------------------------------------------------

TEST(SweepN, SingleModelIsFlat) {
  std::vector<TraceEvent> trace;
  for (int i = 0; i < 40; ++i) trace.push_back(ev(0.3 * i, 0, 20, 15));
  const std::vector<std::size_t> ns = {1, 2, 4, 8};
  const auto m = sweep_n(trace, SimConfig{}, ns);
  ASSERT_EQ(m.size(), 4u);
  for (const auto& [n, lat] : m) EXPECT_DOUBLE_EQ(lat, m.at(1));
}

TEST(SweepN, TotalOnHeavyTail) {
  WorkloadSpec s;
  s.rate = 2.0;
  s.duration = 60.0;
  s.zipf_alpha = 1.1;
  s.seed = 4;
  const std::vector<std::size_t> ns = {1, 2, 3, 5, 8};
  const auto m = sweep_n(gen_trace(s), SimConfig{}, ns);
  EXPECT_EQ(m.size(), ns.size());
  for (auto n : ns) EXPECT_TRUE(m.contains(n));
  const std::vector<std::size_t> zero = {0};
  EXPECT_THROW(sweep_n(gen_trace(s), SimConfig{}, zero), ArgumentError);
}

// ---- reporting ------------------------------------------------------------

TEST(MetricsIo, JsonRoundTripAndCsv) {
  WorkloadSpec s;
  s.seed = 2;
  s.duration = 60.0;
  const auto m = run_sim(gen_trace(s), SimConfig{});
  const Metrics back = metrics_from_json(metrics_to_json(m));
  EXPECT_EQ(back.mode, m.mode);
  EXPECT_EQ(back.finished, m.finished);
  ASSERT_EQ(back.requests.size(), m.requests.size());
  for (std::size_t i = 0; i < m.requests.size(); ++i) {
    EXPECT_EQ(back.requests[i], m.requests[i]);
  }
  EXPECT_DOUBLE_EQ(back.throughput, m.throughput);
  const std::string csv = metrics_to_csv(m);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), m.requests.size() + 1);
  EXPECT_THROW(metrics_from_json("{}"), ArgumentError);
  EXPECT_THROW(metrics_from_json("not json"), ArgumentError);
}

TEST(Mode, Parse) {
  EXPECT_EQ(parse_mode("deltazip"), Mode::kDeltaZip);
  EXPECT_EQ(parse_mode("scb"), Mode::kScbBaseline);
  EXPECT_THROW(parse_mode("vllm"), ArgumentError);
}

}  // namespace
}  // namespace deltazip::simulator
