// Copyright (c) 2026, The tpuemu Authors.
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//         http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tpuemu/bench/bench.hpp"
#include "tpuemu/codec/model_blob.hpp"
#include "tpuemu/core/error.hpp"

using namespace tpuemu;

namespace {

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) raise(Errc::usage_error, "--range expects LO:HI");
  std::size_t used_lo = 0, used_hi = 0;
  const std::string lo_text = text.substr(0, colon), hi_text = text.substr(colon + 1);
  double lo = 0, hi = 0;
  try {
    lo = std::stod(lo_text, &used_lo);
    hi = std::stod(hi_text, &used_hi);
  } catch (const std::exception&) {
    raise(Errc::usage_error, "--range expects LO:HI");
  }
  if (used_lo != lo_text.size() || used_hi != hi_text.size() || !(lo < hi))
    raise(Errc::usage_error, "--range expects LO:HI with LO < HI");
  return {lo, hi};
}

void print_characterization(const bench::Characterization& c) {
  const auto& s = c.sample;
  std::printf("op               %s\n", to_string(s.kind));
  std::printf("input_bytes      %zu\n", s.input_bytes);
  std::printf("t1_us            %.3f\n", s.t1_us);
  std::printf("t2_us            %.3f\n", s.t2_us);
  std::printf("ops              %.2f\n", c.ops);
  std::printf("rps              %.2f\n", c.rps);
  if (c.exchange_rate)
    std::printf("exchange_mb_s    %.3f\n", *c.exchange_rate / (1 << 20));
  else
    std::printf("exchange_mb_s    n/a\n");
}

void print_run(const bench::RunReport& r) {
  std::printf("app              %s\n", r.app.c_str());
  std::printf("mode             %s\n", r.input.mode.c_str());
  std::printf("mape_percent     %.4f\n", r.error.mape * 100);
  std::printf("rmse_percent     %.4f\n", r.error.rmse_normalized * 100);
  std::printf("max_abs_error    %.6g\n", r.error.max_abs_error);
  std::printf("saturation       %llu\n", static_cast<unsigned long long>(r.saturation_events));
  std::printf("overflow         %llu\n", static_cast<unsigned long long>(r.overflow_events));
  for (const auto& [kind, n] : r.instructions)
    std::printf("instr.%-10s %llu\n", kind.c_str(), static_cast<unsigned long long>(n));
  for (std::size_t d = 0; d < r.makespan_us.size(); ++d)
    std::printf("makespan.%-7zu %.1f us  speedup %.2f\n", d + 1, r.makespan_us[d],
                r.makespan_us[0] / r.makespan_us[d]);
  if (r.wall_seconds) std::printf("wall_seconds     %.3f\n", *r.wall_seconds);
}

void print_blob(const std::string& path) {
  const auto bytes = codec::read_file(path);
  const auto blob = codec::decode(bytes);
  const auto& m = blob.metadata;
  std::printf("path             %s\n", path.c_str());
  std::printf("bytes            %zu\n", bytes.size());
  std::printf("crc32            %08x\n", codec::crc32(bytes));
  std::printf("data_bytes       %u\n", m.data_bytes);
  std::printf("padded_shape     %ux%u\n", m.padded_rows, m.padded_cols);
  std::printf("logical_shape    %ux%u\n", m.logical_rows, m.logical_cols);
  std::printf("scale            %.9g\n", static_cast<double>(m.scale));
  std::printf("zero_point       %u\n", static_cast<unsigned>(m.zero_point));
  std::printf("kind             %s\n", to_string(m.kind));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized accelerator emulator harness"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Runtime and device profile overrides (key = value)")
      ->check(CLI::ExistingFile);

  auto* chr = app.add_subcommand("characterize", "Measure OPS, RPS and transfer rate of one operator");
  std::string op_name;
  Index rows = 0, cols = 0;
  chr->add_option("--op", op_name, "Operator kind")->required();
  chr->add_option("--rows", rows, "Input rows")->required()->check(CLI::PositiveNumber);
  chr->add_option("--cols", cols, "Input columns")->required()->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run", "Run an application against the float64 reference");
  bench::RunOptions opts;
  std::string range, mode = "quantized", report_path, format;
  std::size_t devices = 0;
  run->add_option("--app", opts.app, "Application")->required()->check(CLI::IsMember(bench::kApps));
  run->add_option("--size", opts.size, "Problem size")->required()->check(CLI::PositiveNumber);
  run->add_option("--range", range, "Input value range LO:HI");
  run->add_option("--seed", opts.seed, "Dataset seed");
  run->add_option("--devices", devices, "Largest simulated device count")->check(CLI::PositiveNumber);
  run->add_option("--mode", mode, "quantized or oracle-replay")
      ->check(CLI::IsMember({"quantized", "oracle-replay"}));
  run->add_option("--report", report_path, "Write the run report here");
  run->add_option("--format", format, "Report format: json or csv (default from extension)")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_flag("--wall-clock", opts.wall_clock, "Also record host wall-clock time");

  auto* inspect = app.add_subcommand("inspect-model", "Decode a model blob and print its header");
  std::string blob_path;
  inspect->add_option("path", blob_path, "Blob file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RuntimeConfig config = config_path.empty() ? RuntimeConfig{} : load_runtime_config(config_path);
    if (*chr) {
      const auto kind = parse_op_kind(op_name);
      if (!kind) raise(Errc::usage_error, "unknown operator '" + op_name + "'");
      print_characterization(bench::characterize(*kind, {rows, cols}, config.profile));
    } else if (*run) {
      if (!range.empty()) opts.range = parse_range(range);
      if (devices > 0) config.devices = devices;
      config.mode = mode == "oracle-replay" ? LowerMode::oracle : LowerMode::quantized;
      const bench::RunReport r = bench::run_app(opts, config);
      print_run(r);
      if (!report_path.empty()) {
        if (format.empty()) format = report_path.ends_with(".csv") ? "csv" : "json";
        bench::write_report(r, format, report_path);
      }
    } else if (*inspect) {
      print_blob(blob_path);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
    return 2;
  }
  return 0;
}
