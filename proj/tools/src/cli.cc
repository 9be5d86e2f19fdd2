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

#include "deltazip_cli/cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "deltazip/compress/delta_format.h"
#include "deltazip/compress/pipeline.h"
#include "deltazip/errors.h"
#include "deltazip/rng.h"
#include "deltazip/scheduler/scheduler.h"
#include "deltazip/simulator/simulator.h"

namespace deltazip::cli {
namespace {

namespace fs = std::filesystem;
using compress::CompressConfig;
using simulator::Metrics;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("write to '" + path + "' failed");
}

// "-" means the given stream.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    spill(path, text);
  }
}

Matrix read_calibration(const std::string& path) {
  const WeightStack s = read_weight_stack(path);
  if (s.size() != 1) {
    throw InputError("calibration file '" + path + "' must hold exactly one matrix, found " +
                     std::to_string(s.size()));
  }
  return s[0].weight;
}

// "1..8" or "1,2,4".
std::vector<std::size_t> parse_n_list(const std::string& text) {
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 1) {
      throw ArgumentError("bad N list '" + text + "' (expected e.g. 1..8 or 1,2,4)");
    }
    return v;
  };
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::size_t lo = number(std::string_view(text).substr(0, dots));
    const std::size_t hi = number(std::string_view(text).substr(dots + 2));
    if (hi < lo) throw ArgumentError("bad N range '" + text + "'");
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(number(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size() || !(v >= 0.0)) {
      throw ArgumentError("bad SLO grid '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ArgumentError("empty SLO grid");
  std::sort(out.begin(), out.end());
  return out;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// Left-aligned text table.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << r[c];
      if (c + 1 < r.size()) out << std::string(width[c] - r[c].size() + 2, ' ');
    }
    out << '\n';
  }
}

void print_csv(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
    out << '\n';
  }
}

// ---- gen-model ------------------------------------------------------------

struct GenModelArgs {
  SyntheticModelSpec spec;
  std::string out_dir = ".";
};

int cmd_gen_model(const GenModelArgs& a, std::ostream& out) {
  const SyntheticModel m = make_synthetic_model(a.spec);
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + dir.string() + "': " + ec.message());
  WeightStack calib;
  calib.add_layer("calibration", m.calibration);
  write_weight_stack(m.base, dir / "base.dzwt");
  write_weight_stack(m.finetuned, dir / "finetuned.dzwt");
  write_weight_stack(calib, dir / "calib.dzwt");
  out << "wrote " << (dir / "base.dzwt").string() << ", " << (dir / "finetuned.dzwt").string()
      << ", " << (dir / "calib.dzwt").string() << " (" << a.spec.layers << " layers of "
      << a.spec.dim << "x" << a.spec.dim << ", " << a.spec.samples << " calibration samples)\n";
  return kExitOk;
}

// ---- compress -------------------------------------------------------------

struct CompressArgs {
  std::string base, finetuned, calib, out_path;
  std::string base_id = "base";
  std::string sparsity = "auto";
  std::string lossless = "none";
  CompressConfig cfg;
};

int cmd_compress(CompressArgs a, std::ostream& out) {
  // The exact pass-through stays dense unless asked otherwise.
  if (a.sparsity == "auto") a.sparsity = a.cfg.bits == 16 ? "none" : "2:4";
  a.cfg.sparsity = compress::parse_sparsity(a.sparsity);
  a.cfg.lossless = compress::parse_lossless(a.lossless);
  a.cfg.validate();

  const WeightStack base = read_weight_stack(a.base);
  const WeightStack tuned = read_weight_stack(a.finetuned);
  const compress::CalibrationSet calib{read_calibration(a.calib)};
  const auto result = compress::compress_model(tuned, base, calib, a.cfg, a.base_id);
  const auto bytes = compress::encode_delta(result.delta);
  spill(a.out_path, std::string(bytes.begin(), bytes.end()));
  const auto info = compress::inspect_delta(bytes);

  std::vector<std::vector<std::string>> rows = {{"layer", "shape", "proxy_loss", "bytes", "max_abs_err"}};
  double worst = 0.0;
  for (std::size_t i = 0; i < result.delta.layers.size(); ++i) {
    const auto& l = info.layers[i];
    const Matrix& want = tuned[i].weight;
    const Matrix& got = result.reconstructed[i].weight;
    double err = 0.0;
    for (std::size_t r = 0; r < want.rows(); ++r) {
      for (std::size_t c = 0; c < want.cols(); ++c) err = std::max(err, std::abs(want(r, c) - got(r, c)));
    }
    worst = std::max(worst, err);
    rows.push_back({l.name, std::to_string(l.rows) + "x" + std::to_string(l.cols),
                    fmt(result.proxy_losses[i], 6),
                    std::to_string(l.scales_bytes + l.index_bytes + l.payload_bytes), fmt(err, 3)});
  }
  print_table(out, rows);
  out << "wrote " << a.out_path << ": " << info.file_bytes << " bytes vs " << info.dense_fp16_bytes
      << " dense fp16 bytes, compression ratio " << std::fixed << std::setprecision(2)
      << info.compression_ratio << "x\n"
      << std::defaultfloat << "max reconstruction error " << fmt(worst, 3) << '\n';
  return kExitOk;
}

// ---- inspect --------------------------------------------------------------

int cmd_inspect(const std::string& path, std::ostream& out) {
  const std::string raw = slurp(path);
  const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
  const auto info = compress::inspect_delta(bytes);
  const auto& cd = info.delta;
  out << "base_model_id: " << cd.base_model_id << '\n'
      << "bits: " << cd.config.bits << '\n'
      << "sparsity: " << compress::to_string(cd.config.sparsity) << '\n'
      << "group_size: " << cd.config.group_size << '\n'
      << "damping: " << cd.config.damping << '\n'
      << "block_size: " << cd.config.block_size << '\n'
      << "lossless: " << compress::to_string(cd.config.lossless) << '\n'
      << "calibration_fingerprint: " << cd.calibration_fingerprint << '\n'
      << "layers: " << cd.layers.size() << '\n';
  std::vector<std::vector<std::string>> rows = {{"layer", "shape", "scales_bytes", "index_bytes", "payload_bytes"}};
  for (const auto& l : info.layers) {
    rows.push_back({l.name, std::to_string(l.rows) + "x" + std::to_string(l.cols),
                    std::to_string(l.scales_bytes), std::to_string(l.index_bytes),
                    std::to_string(l.payload_bytes)});
  }
  print_table(out, rows);
  out << "file_bytes: " << info.file_bytes << '\n'
      << "dense_fp16_bytes: " << info.dense_fp16_bytes << '\n'
      << "compression_ratio: " << std::fixed << std::setprecision(3) << info.compression_ratio
      << std::defaultfloat << '\n';
  return kExitOk;
}

// ---- gen-trace ------------------------------------------------------------

struct GenTraceArgs {
  simulator::WorkloadSpec spec;
  std::string dist = "zipf:1.5";
  std::string out_path = "-";
};

int cmd_gen_trace(GenTraceArgs a, std::ostream& out) {
  simulator::apply_popularity(a.spec, a.dist);
  a.spec.validate();
  std::ostringstream s;
  simulator::write_trace_jsonl(simulator::gen_trace(a.spec), s);
  emit(a.out_path, s.str(), out);
  return kExitOk;
}

// ---- serve-sim ------------------------------------------------------------

struct ServeSimArgs {
  std::string trace = "-";
  std::string mode = "deltazip";
  std::string out_path = "-";
  std::string csv_path;
  std::string baseline_out;
  std::string cost_file;
  std::vector<std::string> cost_overrides;
  std::string sweep;
  bool compare = false;
  bool naive_kernel = false;
  bool no_preemption = false;
  bool eager_evict = false;
  std::size_t max_requests = 32;
  std::size_t max_deltas = 3;
  std::size_t scb_models = 2;
  std::size_t models = 32;
  double delta_bytes = 5e9;
  double model_bytes = 26e9;
};

simulator::SimConfig sim_config(const ServeSimArgs& a) {
  simulator::SimConfig cfg;
  cfg.mode = simulator::parse_mode(a.mode);
  cfg.scheduler.max_requests = a.max_requests;
  cfg.scheduler.max_deltas = a.max_deltas;
  cfg.scheduler.eager_evict = a.eager_evict;
  cfg.scheduler.allow_preemption = !a.no_preemption;
  cfg.grouped_kernel = !a.naive_kernel;
  cfg.scb_resident_models = a.scb_models;
  cfg.n_models = a.models;
  cfg.delta_bytes = a.delta_bytes;
  cfg.model_bytes = a.model_bytes;
  if (!a.cost_file.empty()) cfg.cost = simulator::parse_cost_overrides(slurp(a.cost_file));
  for (const auto& kv : a.cost_overrides) cfg.cost = simulator::parse_cost_overrides(kv, cfg.cost);
  cfg.validate();
  return cfg;
}

void print_summary_rows(std::vector<std::vector<std::string>>& rows, const Metrics& m) {
  rows.push_back({m.mode, std::to_string(m.requests.size()), fmt(m.throughput), fmt(m.mean_e2e),
                  fmt(m.mean_ttft), fmt(m.mean_queueing), fmt(m.mean_loading),
                  fmt(m.mean_inference)});
}

int cmd_serve_sim(const ServeSimArgs& a, std::istream& in, std::ostream& out) {
  const simulator::SimConfig cfg = sim_config(a);
  const std::vector<std::size_t> ns = a.sweep.empty() ? std::vector<std::size_t>{}
                                                      : parse_n_list(a.sweep);
  std::vector<simulator::TraceEvent> trace;
  if (a.trace == "-") {
    trace = simulator::read_trace_jsonl(in);
  } else {
    std::ifstream f(a.trace);
    if (!f) throw InputError("cannot open trace '" + a.trace + "'");
    trace = simulator::read_trace_jsonl(f);
  }

  if (!ns.empty()) {
    const auto sweep = simulator::sweep_n(trace, cfg, ns);
    std::vector<std::vector<std::string>> rows = {{"N", "mean_e2e_s"}};
    for (const auto& [n, lat] : sweep) rows.push_back({std::to_string(n), fmt(lat, 6)});
    print_table(out, rows);
    out << "chosen N: " << scheduler::sweep_profile(sweep) << '\n';
    return kExitOk;
  }

  const Metrics m = simulator::run_sim(trace, cfg);
  if (!a.csv_path.empty()) spill(a.csv_path, simulator::metrics_to_csv(m));

  if (a.compare) {
    simulator::SimConfig other = cfg;
    other.mode = cfg.mode == simulator::Mode::kDeltaZip ? simulator::Mode::kScbBaseline
                                                         : simulator::Mode::kDeltaZip;
    const Metrics b = simulator::run_sim(trace, other);
    const Metrics& dz = cfg.mode == simulator::Mode::kDeltaZip ? m : b;
    const Metrics& scb = cfg.mode == simulator::Mode::kDeltaZip ? b : m;
    if (a.out_path != "-") spill(a.out_path, simulator::metrics_to_json(m));
    if (!a.baseline_out.empty()) spill(a.baseline_out, simulator::metrics_to_json(b));
    std::vector<std::vector<std::string>> rows = {{"mode", "requests", "throughput_rps",
                                                   "mean_e2e_s", "mean_ttft_s", "mean_queueing_s",
                                                   "mean_loading_s", "mean_inference_s"}};
    print_summary_rows(rows, dz);
    print_summary_rows(rows, scb);
    print_table(out, rows);
    auto ratio = [](double num, double den) { return den > 0.0 ? fmt(num / den, 4) : "n/a"; };
    out << "throughput ratio (deltazip/scb): " << ratio(dz.throughput, scb.throughput) << '\n'
        << "mean e2e gain (scb/deltazip): " << ratio(scb.mean_e2e, dz.mean_e2e) << '\n'
        << "mean ttft gain (scb/deltazip): " << ratio(scb.mean_ttft, dz.mean_ttft) << '\n';
    return kExitOk;
  }

  emit(a.out_path, simulator::metrics_to_json(m) + "\n", out);
  return kExitOk;
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> files;
  std::string slo = "1,5,10,30,60";
  bool csv = false;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const std::vector<double> grid = parse_grid(a.slo);
  std::vector<Metrics> ms;
  for (const auto& f : a.files) ms.push_back(simulator::metrics_from_json(slurp(f)));

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    labels.push_back(fs::path(a.files[i]).stem().string() + " (" + ms[i].mode + ")");
  }
  std::vector<std::pair<std::string, std::vector<double>>> table = {
      {"requests", {}}, {"throughput_rps", {}}, {"mean_e2e_s", {}}, {"mean_ttft_s", {}},
      {"mean_queueing_s", {}}, {"mean_loading_s", {}}, {"mean_inference_s", {}}};
  for (double s : grid) table.push_back({"slo_e2e@" + fmt(s), {}});
  for (double s : grid) table.push_back({"slo_ttft@" + fmt(s), {}});
  for (const auto& m : ms) {
    std::vector<double> values = {static_cast<double>(m.requests.size()), m.throughput,
                                  m.mean_e2e, m.mean_ttft, m.mean_queueing, m.mean_loading,
                                  m.mean_inference};
    const bool any = !m.requests.empty();
    const auto e2e = any ? simulator::slo_attainment(m, grid, simulator::SloKind::kE2e)
                         : std::vector<double>(grid.size(), 0.0);
    const auto ttft = any ? simulator::slo_attainment(m, grid, simulator::SloKind::kTtft)
                          : std::vector<double>(grid.size(), 0.0);
    values.insert(values.end(), e2e.begin(), e2e.end());
    values.insert(values.end(), ttft.begin(), ttft.end());
    for (std::size_t r = 0; r < table.size(); ++r) table[r].second.push_back(values[r]);
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"metric"};
  header.insert(header.end(), labels.begin(), labels.end());
  if (ms.size() == 2) header.push_back("ratio");
  rows.push_back(header);
  for (const auto& [name, values] : table) {
    std::vector<std::string> row = {name};
    for (double v : values) row.push_back(fmt(v));
    if (ms.size() == 2) row.push_back(values[1] != 0.0 ? fmt(values[0] / values[1]) : "n/a");
    rows.push_back(row);
  }
  if (a.csv) {
    print_csv(out, rows);
  } else {
    print_table(out, rows);
  }
  return kExitOk;
}

// Values as they will be after a DZWT round trip.
Matrix to_f32(Matrix m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double& v : m.row(r)) v = static_cast<float>(v);
  }
  return m;
}

}  // namespace

SyntheticModel make_synthetic_model(const SyntheticModelSpec& spec) {
  if (spec.layers < 1 || spec.dim < 1 || spec.samples < 1) {
    throw ArgumentError("gen-model: layers, dim and samples must be >= 1");
  }
  if (!(spec.delta_ratio >= 0.0)) throw ArgumentError("gen-model: delta ratio must be >= 0");
  Rng rng(spec.seed);
  const double base_sd = 1.0 / std::sqrt(static_cast<double>(spec.dim));
  SyntheticModel m;
  for (std::size_t i = 0; i < spec.layers; ++i) {
    const std::string name = "layer" + std::to_string(i);
    const ParallelAxis axis = i % 2 == 0 ? ParallelAxis::kColumn : ParallelAxis::kRow;
    Matrix w = to_f32(gaussian_matrix(rng, spec.dim, spec.dim, base_sd));
    Matrix f = to_f32(w + gaussian_matrix(rng, spec.dim, spec.dim, base_sd * spec.delta_ratio));
    m.finetuned.add_layer(name, std::move(f), axis);
    m.base.add_layer(name, std::move(w), axis);
  }
  const std::size_t factors = std::max<std::size_t>(1, spec.dim / 8);
  const Matrix mix = gaussian_matrix(rng, spec.dim, factors, 1.0);
  const Matrix latent = gaussian_matrix(rng, factors, spec.samples, 1.0);
  m.calibration = to_f32(matmul(mix, latent) + gaussian_matrix(rng, spec.dim, spec.samples, 0.5));
  return m;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Compress fine-tuned model deltas and simulate multi-variant serving."};
  app.name(args.empty() ? "deltazip" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with flag defaults");

  GenModelArgs gm;
  auto* gen_model = app.add_subcommand("gen-model", "Write a synthetic base/finetuned/calibration trio");
  gen_model->add_option("--layers", gm.spec.layers, "Number of layers")->check(CLI::PositiveNumber);
  gen_model->add_option("--dim", gm.spec.dim, "Width of every square layer")->check(CLI::PositiveNumber);
  gen_model->add_option("--samples", gm.spec.samples, "Calibration samples")->check(CLI::PositiveNumber);
  gen_model->add_option("--delta-ratio", gm.spec.delta_ratio, "Delta stddev relative to the base")
      ->check(CLI::NonNegativeNumber);
  gen_model->add_option("--seed", gm.spec.seed, "RNG seed");
  gen_model->add_option("--out-dir", gm.out_dir, "Output directory");

  CompressArgs ca;
  auto* comp = app.add_subcommand("compress", "Compress finetuned - base into a DZDL file");
  comp->add_option("--base", ca.base, "Base weights (DZWT)")->required();
  comp->add_option("--finetuned", ca.finetuned, "Finetuned weights (DZWT)")->required();
  comp->add_option("--calib", ca.calib, "Calibration inputs (single-matrix DZWT)")->required();
  comp->add_option("-o,--out", ca.out_path, "Output DZDL file")->required();
  comp->add_option("--bits", ca.cfg.bits, "2, 3, 4, 8 or 16 (exact)");
  comp->add_option("--sparsity", ca.sparsity, "2:4 or none (default: none for --bits 16, else 2:4)");
  comp->add_option("--group-size", ca.cfg.group_size, "Columns per quantization group");
  comp->add_option("--damping", ca.cfg.damping, "Relative Hessian damping");
  comp->add_option("--block-size", ca.cfg.block_size, "Solver block width");
  comp->add_option("--lossless", ca.lossless, "none or deflate");
  comp->add_option("--base-id", ca.base_id, "Identifier recorded in the header");

  std::string inspect_path;
  auto* insp = app.add_subcommand("inspect", "Print the header and per-layer footprint of a DZDL file");
  insp->add_option("file", inspect_path, "DZDL file")->required();

  GenTraceArgs gt;
  auto* gen_trace = app.add_subcommand("gen-trace", "Write a synthetic request trace as JSONL");
  gen_trace->add_option("--rate", gt.spec.rate, "Poisson arrivals per second");
  gen_trace->add_option("--duration", gt.spec.duration, "Trace length in seconds");
  gen_trace->add_option("--dist", gt.dist, "uniform, zipf:<alpha> or trace:<path>");
  gen_trace->add_option("--models", gt.spec.n_models, "Number of model variants");
  gen_trace->add_option("--prompt-median", gt.spec.lengths.prompt_median, "Median prompt tokens");
  gen_trace->add_option("--decode-median", gt.spec.lengths.decode_median, "Median decode tokens");
  gen_trace->add_option("--length-sigma", gt.spec.lengths.sigma, "Log-normal sigma of lengths");
  gen_trace->add_option("--seed", gt.spec.seed, "RNG seed");
  gen_trace->add_option("-o,--out", gt.out_path, "Output file, - for stdout");

  ServeSimArgs ss;
  auto* serve = app.add_subcommand("serve-sim", "Replay a trace through the serving simulator");
  serve->add_option("--trace", ss.trace, "JSONL trace, - for stdin");
  serve->add_option("--mode", ss.mode, "deltazip or scb");
  serve->add_option("-o,--out", ss.out_path, "Metrics JSON, - for stdout");
  serve->add_option("--csv", ss.csv_path, "Also write per-request CSV here");
  serve->add_option("--baseline-out", ss.baseline_out, "Metrics JSON of the other mode (with --compare-baseline)");
  serve->add_flag("--compare-baseline", ss.compare, "Run both modes and print the ratio table");
  serve->add_option("--sweep-n", ss.sweep, "Sweep N over e.g. 1..8 and print mean latency per N");
  serve->add_option("--max-requests", ss.max_requests, "K, requests per batch")->check(CLI::PositiveNumber);
  serve->add_option("--max-deltas", ss.max_deltas, "N, deltas per batch")->check(CLI::PositiveNumber);
  serve->add_option("--scb-models", ss.scb_models, "Full models resident in baseline mode")
      ->check(CLI::PositiveNumber);
  serve->add_option("--models", ss.models, "Valid model ids are [0, models)");
  serve->add_option("--delta-bytes", ss.delta_bytes, "Compressed delta size");
  serve->add_option("--model-bytes", ss.model_bytes, "Full fp16 model size");
  serve->add_flag("--naive-kernel", ss.naive_kernel, "Charge one kernel launch per delta");
  serve->add_flag("--no-preemption", ss.no_preemption, "Disable skip-the-line preemption");
  serve->add_flag("--eager-evict", ss.eager_evict, "Evict idle deltas as soon as they leave the batch");
  serve->add_option("--cost-file", ss.cost_file, "key = value cost constants");
  serve->add_option("--cost", ss.cost_overrides, "key=value cost constant (repeatable)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Tabulate one or more metrics files");
  report->add_option("files", ra.files, "Metrics JSON files")->required();
  report->add_option("--slo", ra.slo, "Comma-separated SLO grid in seconds");
  report->add_flag("--csv", ra.csv, "CSV instead of an aligned table");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("deltazip");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (gen_model->parsed()) return cmd_gen_model(gm, out);
    if (comp->parsed()) return cmd_compress(ca, out);
    if (insp->parsed()) return cmd_inspect(inspect_path, out);
    if (gen_trace->parsed()) return cmd_gen_trace(gt, out);
    if (serve->parsed()) return cmd_serve_sim(ss, in, out);
    if (report->parsed()) return cmd_report(ra, out);
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace deltazip::cli
