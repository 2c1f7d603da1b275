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

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "tpuemu/bench/bench.hpp"
#include "tpuemu/core/error.hpp"

namespace tpuemu::bench {
namespace {

using nlohmann::json;

std::string number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void add_row(std::ostringstream& os, const std::string& metric, const std::string& value, const char* unit,
             const char* provenance) {
  os << metric << ',' << value << ',' << unit << ',' << provenance << '\n';
}

}  // namespace

std::string to_json(const RunReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["app"] = r.app;
  j["input"] = {{"size", r.input.size},         {"dims", r.input.dims},   {"range", {r.input.range_lo, r.input.range_hi}},
                {"seed", r.input.seed},         {"devices", r.input.devices}, {"mode", r.input.mode}};
  j["error"] = {{"mape", r.error.mape},
                {"rmse_normalized", r.error.rmse_normalized},
                {"max_abs_error", r.error.max_abs_error},
                {"count", r.error.count}};
  j["instructions"] = r.instructions;
  j["makespan_us"] = r.makespan_us;
  j["saturation_events"] = r.saturation_events;
  j["overflow_events"] = r.overflow_events;
  j["input_clamps"] = r.input_clamps;
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j.dump(2) + "\n";
}

RunReport from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion)
      raise(Errc::invalid_input, "unsupported report schema " + std::to_string(r.schema_version));
    r.app = j.at("app").get<std::string>();
    const json& in = j.at("input");
    r.input.size = in.at("size").get<Index>();
    r.input.dims = in.at("dims").get<std::vector<Index>>();
    r.input.range_lo = in.at("range").at(0).get<double>();
    r.input.range_hi = in.at("range").at(1).get<double>();
    r.input.seed = in.at("seed").get<std::uint64_t>();
    r.input.devices = in.at("devices").get<std::size_t>();
    r.input.mode = in.at("mode").get<std::string>();
    const json& e = j.at("error");
    r.error.mape = e.at("mape").get<double>();
    r.error.rmse_normalized = e.at("rmse_normalized").get<double>();
    r.error.max_abs_error = e.at("max_abs_error").get<double>();
    r.error.count = e.at("count").get<Index>();
    r.instructions = j.at("instructions").get<std::map<std::string, std::uint64_t>>();
    r.makespan_us = j.at("makespan_us").get<std::vector<double>>();
    r.saturation_events = j.at("saturation_events").get<std::uint64_t>();
    r.overflow_events = j.at("overflow_events").get<std::uint64_t>();
    r.input_clamps = j.at("input_clamps").get<std::uint64_t>();
    if (j.contains("wall_seconds")) r.wall_seconds = j.at("wall_seconds").get<double>();
    return r;
  } catch (const json::exception& ex) {
    raise(Errc::invalid_input, std::string("bad report: ") + ex.what());
  }
}

std::string to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "metric,value,unit,provenance\n";
  add_row(os, "schema_version", std::to_string(r.schema_version), "", "config");
  add_row(os, "app", r.app, "", "config");
  add_row(os, "size", std::to_string(r.input.size), "elements", "config");
  add_row(os, "range_lo", number(r.input.range_lo), "", "config");
  add_row(os, "range_hi", number(r.input.range_hi), "", "config");
  add_row(os, "seed", std::to_string(r.input.seed), "", "config");
  add_row(os, "devices", std::to_string(r.input.devices), "devices", "config");
  add_row(os, "mode", r.input.mode, "", "config");
  add_row(os, "mape", number(r.error.mape), "fraction", "measured");
  add_row(os, "rmse_normalized", number(r.error.rmse_normalized), "fraction", "measured");
  add_row(os, "max_abs_error", number(r.error.max_abs_error), "", "measured");
  add_row(os, "compared_values", std::to_string(r.error.count), "values", "measured");
  for (const auto& [kind, n] : r.instructions)
    add_row(os, "instructions." + kind, std::to_string(n), "instructions", "measured");
  for (std::size_t d = 0; d < r.makespan_us.size(); ++d)
    add_row(os, "makespan." + std::to_string(d + 1), number(r.makespan_us[d]), "us", "simulated");
  add_row(os, "saturation_events", std::to_string(r.saturation_events), "events", "measured");
  add_row(os, "overflow_events", std::to_string(r.overflow_events), "events", "measured");
  add_row(os, "input_clamps", std::to_string(r.input_clamps), "values", "measured");
  if (r.wall_seconds) add_row(os, "wall_seconds", number(*r.wall_seconds), "s", "wall-clock");
  return os.str();
}

void write_report(const RunReport& r, const std::string& format, const std::string& path) {
  std::string text;
  if (format == "json")
    text = to_json(r);
  else if (format == "csv")
    text = to_csv(r);
  else
    raise(Errc::usage_error, "report format must be json or csv");
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::invalid_input, "cannot write " + path);
  f << text;
  if (!f.flush()) raise(Errc::invalid_input, "cannot write " + path);
}

RunReport load_report(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::invalid_input, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_json(ss.str());
}

}  // namespace tpuemu::bench
