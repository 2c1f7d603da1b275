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

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tpuemu/core/oracle.hpp"

namespace tpuemu {

struct DeviceProfile {
  std::size_t onchip_memory_bytes = std::size_t{8} << 20;
  double transfer_ms_per_mb = 6.0;
  // Instructions per second, indexed by OpKind.
  std::array<double, kAllOpKinds.size()> ops = {
      10268.80,  // conv2d
      51924.96,  // fully_connected
      6203.52,   // add
      6273.28,   // sub
      14515.84,  // mul
      4867.96,   // crop
      1604.78,   // ext
      408.54,    // mean
      477.08,    // max
      3232.31,   // tanh
      11194.26,  // relu
  };
  Index arithmetic_tile = 128;
  Index reduce_tile = 64;
  // Smaller than arithmetic_tile so a 256 x 256 product still splits into
  // enough independent input tiles to occupy 8 devices.
  Index gemm_tile = 64;

  double ops_for(OpKind k) const { return ops[static_cast<std::size_t>(k)]; }
  double instruction_us(OpKind k) const { return 1e6 / ops_for(k); }
  double transfer_us(std::size_t bytes) const;

  // Returns false for keys this profile does not own. Keys: memory_bytes,
  // transfer_ms_per_mb, arithmetic_tile, reduce_tile, gemm_tile, ops.<kind>.
  bool apply(const std::string& key, const std::string& value);
  void validate() const;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// INI-style `key = value` file; `[section]` headers prefix keys with "section.".
KeyValues read_key_values(const std::string& path);

// Applies every key in the file; unknown keys are an invalid-input error.
DeviceProfile load_profile(const std::string& path);

}  // namespace tpuemu
