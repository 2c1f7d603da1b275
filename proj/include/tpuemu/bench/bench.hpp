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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tpuemu/core/metrics.hpp"
#include "tpuemu/runtime/runtime.hpp"

namespace tpuemu::bench {

inline constexpr std::uint64_t kShortLoop = 10'000;
inline constexpr std::uint64_t kLongLoop = 20'000;

struct CharacterizationSample {
  OpKind kind = OpKind::add;
  std::size_t input_bytes = 0;
  double t1_us = 0.0;
  double t2_us = 0.0;
  std::uint64_t r1 = 0;
  std::uint64_t r2 = 0;
};

struct Characterization {
  CharacterizationSample sample;
  double ops = 0.0;
  double rps = 0.0;
  // Bytes per second; empty when t1 - (t2 - t1) is not positive.
  std::optional<double> exchange_rate;
};

// Runs the 10k and 20k loops on fresh emulated devices. Each loop pays the
// input transfer once, then repeats one instruction.
CharacterizationSample measure(OpKind kind, TensorShape input, const DeviceProfile& profile = {});
Characterization derive(const CharacterizationSample& s);
Characterization characterize(OpKind kind, TensorShape input, const DeviceProfile& profile = {});

inline const std::vector<std::string> kApps = {"gemm",     "pagerank", "hotspot3d",   "lud",
                                               "gaussian", "backprop", "blackscholes"};

struct RunOptions {
  std::string app = "gemm";
  Index size = 256;
  std::optional<std::pair<double, double>> range;  // used by gemm and pagerank
  std::uint64_t seed = kDefaultSeed;
  bool wall_clock = false;
};

struct InputSpec {
  Index size = 0;
  std::vector<Index> dims;
  double range_lo = 0.0;
  double range_hi = 0.0;
  std::uint64_t seed = 0;
  std::size_t devices = 1;
  std::string mode;

  friend bool operator==(const InputSpec&, const InputSpec&) = default;
};

inline constexpr int kReportSchemaVersion = 1;

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string app;
  InputSpec input;
  ErrorReport error;
  std::map<std::string, std::uint64_t> instructions;
  std::vector<double> makespan_us;  // entry d - 1 is the makespan on d devices
  std::uint64_t saturation_events = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t input_clamps = 0;
  std::optional<double> wall_seconds;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// config.devices sets the largest device count reported.
RunReport run_app(const RunOptions& options, const RuntimeConfig& config = {});

std::string to_json(const RunReport& r);
RunReport from_json(const std::string& text);
std::string to_csv(const RunReport& r);
// format is "json" or "csv".
void write_report(const RunReport& r, const std::string& format, const std::string& path);
RunReport load_report(const std::string& path);

}  // namespace tpuemu::bench
