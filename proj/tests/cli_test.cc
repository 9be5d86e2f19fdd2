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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "deltazip/compress/delta_format.h"
#include "deltazip/simulator/simulator.h"
#include "deltazip_cli/cli.h"

namespace deltazip::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "deltazip");
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = run(args, in, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("deltazip_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void gen_model(const std::string& extra_dim = "64") {
    const auto r = call({"gen-model", "--layers", "3", "--dim", extra_dim, "--samples", "48",
                         "--seed", "3", "--out-dir", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpExitsZeroEverywhere) {
  EXPECT_EQ(call({"--help"}).code, 0);
  for (const char* sub : {"gen-model", "compress", "inspect", "gen-trace", "serve-sim", "report"}) {
    const auto r = call({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"serve-sim", "--max-deltas", "0"}).code, 1);
  EXPECT_EQ(call({"serve-sim", "--sweep-n", "3..1"}, "").code, 1);
}

TEST_F(CliTest, CompressInspectRoundTrip) {
  gen_model();
  const auto r = call({"compress", "--base", path("base.dzwt"), "--finetuned", path("finetuned.dzwt"),
                       "--calib", path("calib.dzwt"), "-o", path("d.dzdl"), "--group-size", "64"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("layer2"), std::string::npos);
  EXPECT_NE(r.out.find("compression ratio"), std::string::npos);
  const auto cd = compress::read_delta(path("d.dzdl"));
  EXPECT_EQ(cd.layers.size(), 3u);
  EXPECT_EQ(cd.config.bits, 4);

  const auto i = call({"inspect", path("d.dzdl")});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_NE(i.out.find("sparsity: 2:4"), std::string::npos);
  EXPECT_NE(i.out.find("compression_ratio:"), std::string::npos);
}

TEST_F(CliTest, SixteenBitIsExact) {
  gen_model();
  const auto r = call({"compress", "--base", path("base.dzwt"), "--finetuned", path("finetuned.dzwt"),
                       "--calib", path("calib.dzwt"), "-o", path("d.dzdl"), "--bits", "16"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max reconstruction error 0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, MissingInputNamesPath) {
  const auto r = call({"compress", "--base", path("nope.dzwt"), "--finetuned", path("nope.dzwt"),
                       "--calib", path("nope.dzwt"), "-o", path("d.dzdl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.dzwt"), std::string::npos);
}

TEST_F(CliTest, CorruptDeltaExitsOne) {
  std::ofstream(path("bad.dzdl")) << "DZDLgarbage";
  EXPECT_EQ(call({"inspect", path("bad.dzdl")}).code, 1);
}

TEST_F(CliTest, ZeroCalibrationExitsTwo) {
  gen_model();
  WeightStack zero;
  zero.add_layer("calibration", Matrix(64, 8));
  write_weight_stack(zero, path("zero.dzwt"));
  const auto r = call({"compress", "--base", path("base.dzwt"), "--finetuned", path("finetuned.dzwt"),
                       "--calib", path("zero.dzwt"), "-o", path("d.dzdl")});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST_F(CliTest, TracePipelineProducesMetrics) {
  const auto t = call({"gen-trace", "--rate", "0.5", "--dist", "zipf:1.5", "--models", "32", "--seed", "7"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out, call({"gen-trace", "--rate", "0.5", "--dist", "zipf:1.5", "--models", "32", "--seed", "7"}).out);
  const auto trace = simulator::parse_trace_jsonl(t.out);
  ASSERT_FALSE(trace.empty());
  EXPECT_LT(trace.back().arrival_s, 300.0);

  const auto s = call({"serve-sim", "--mode", "deltazip"}, t.out);
  ASSERT_EQ(s.code, 0) << s.err;
  const auto m = simulator::metrics_from_json(s.out);
  EXPECT_EQ(m.mode, "deltazip");
  EXPECT_EQ(m.finished, trace.size());
}

TEST_F(CliTest, CompareSweepAndReport) {
  const auto t = call({"gen-trace", "--duration", "60", "--seed", "2", "-o", path("t.jsonl")});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto c = call({"serve-sim", "--trace", path("t.jsonl"), "--compare-baseline", "-o",
                       path("dz.json"), "--baseline-out", path("scb.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("throughput ratio (deltazip/scb)"), std::string::npos);
  EXPECT_NE(c.out.find("mean ttft gain"), std::string::npos);

  const auto sw = call({"serve-sim", "--trace", path("t.jsonl"), "--sweep-n", "1..4"});
  ASSERT_EQ(sw.code, 0) << sw.err;
  EXPECT_NE(sw.out.find("chosen N: "), std::string::npos);

  const auto one = call({"report", path("dz.json")});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out.find("ratio"), std::string::npos);
  const auto two = call({"report", path("dz.json"), path("scb.json"), "--csv", "--slo", "5,1"});
  ASSERT_EQ(two.code, 0) << two.err;
  EXPECT_NE(two.out.find(",ratio\n"), std::string::npos);
  EXPECT_NE(two.out.find("slo_e2e@1,"), std::string::npos);

  std::ofstream(path("bad.json")) << "{bad";
  EXPECT_EQ(call({"report", path("bad.json")}).code, 1);
}

TEST_F(CliTest, TraceErrorsExitOne) {
  const std::string bad = R"({"arrival_s": 0.0, "model": 40, "prompt_tokens": 3, "decode_tokens": 4})";
  EXPECT_EQ(call({"serve-sim"}, bad + "\n").code, 1);
  EXPECT_EQ(call({"serve-sim"}, "not json\n").code, 1);
}

TEST_F(CliTest, CostOverridesApply) {
  const std::string one = R"({"arrival_s": 0.0, "model": 0, "prompt_tokens": 100, "decode_tokens": 10})";
  std::ofstream(path("cost.ini")) << "# slower link\nswap_bandwidth = 1e9\n";
  const auto r = call({"serve-sim", "--delta-bytes", "1e9", "--cost-file", path("cost.ini"), "--cost",
                       "decode_base=0"},
                      one + "\n");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = simulator::metrics_from_json(r.out);
  EXPECT_NEAR(m.requests[0].e2e(), 1.0 + 100 * 2e-4 + 10 * (2e-5 + 2e-3), 1e-12);
  EXPECT_EQ(call({"serve-sim", "--cost", "nope=1"}, one + "\n").code, 1);
}

TEST(SyntheticModel, DeterministicAndSmallDelta) {
  SyntheticModelSpec spec;
  spec.layers = 2;
  spec.dim = 32;
  spec.samples = 16;
  spec.seed = 5;
  const auto a = make_synthetic_model(spec);
  const auto b = make_synthetic_model(spec);
  EXPECT_EQ(a.base, b.base);
  EXPECT_EQ(a.finetuned, b.finetuned);
  const double base_norm = frobenius_norm(a.base[0].weight);
  const double delta_norm = frobenius_distance(a.finetuned[0].weight, a.base[0].weight);
  EXPECT_NEAR(delta_norm / base_norm, 0.02, 0.004);
}

}  // namespace
}  // namespace deltazip::cli
