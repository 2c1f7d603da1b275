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

#include "tpuemu/device/profile.hpp"

#include <CLI11.hpp>

#include <fstream>

#include "tpuemu/core/error.hpp"

namespace tpuemu {
namespace {

double to_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    raise(Errc::invalid_input, "config key " + key + " has non-numeric value '" + value + "'");
  }
}

}  // namespace

double DeviceProfile::transfer_us(std::size_t bytes) const {
  return static_cast<double>(bytes) / double(1 << 20) * transfer_ms_per_mb * 1000.0;
}

bool DeviceProfile::apply(const std::string& key, const std::string& value) {
  if (key == "memory_bytes") {
    onchip_memory_bytes = static_cast<std::size_t>(to_number(key, value));
  } else if (key == "transfer_ms_per_mb") {
    transfer_ms_per_mb = to_number(key, value);
  } else if (key == "arithmetic_tile") {
    arithmetic_tile = static_cast<Index>(to_number(key, value));
  } else if (key == "reduce_tile") {
    reduce_tile = static_cast<Index>(to_number(key, value));
  } else if (key == "gemm_tile") {
    gemm_tile = static_cast<Index>(to_number(key, value));
  } else if (key.starts_with("ops.")) {
    const auto kind = parse_op_kind(key.substr(4));
    if (!kind) raise(Errc::invalid_input, "unknown instruction kind in key " + key);
    ops[static_cast<std::size_t>(*kind)] = to_number(key, value);
  } else {
    return false;
  }
  return true;
}

void DeviceProfile::validate() const {
  if (onchip_memory_bytes == 0) raise(Errc::invalid_input, "device memory must be positive");
  if (!(transfer_ms_per_mb > 0)) raise(Errc::invalid_input, "transfer rate must be positive");
  if (arithmetic_tile < 1 || reduce_tile < 1 || gemm_tile < 1) raise(Errc::invalid_input, "tile edges must be positive");
  for (double r : ops)
    if (!(r > 0)) raise(Errc::invalid_input, "instruction rates must be positive");
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::invalid_input, "cannot open config file " + path);
  KeyValues kv;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string value;
    for (const std::string& s : item.inputs) value += (value.empty() ? "" : " ") + s;
    kv.emplace_back(item.fullname(), value);
  }
  return kv;
}

DeviceProfile load_profile(const std::string& path) {
  DeviceProfile p;
  for (const auto& [key, value] : read_key_values(path))
    if (!p.apply(key, value)) raise(Errc::invalid_input, "unknown device profile key " + key);
  p.validate();
  return p;
}

}  // namespace tpuemu
