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

#include "tpuemu/core/error.hpp"

namespace tpuemu {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::invalid_shape: return "invalid-shape";
    case Errc::missing_operand: return "missing-operand";
    case Errc::device_memory_full: return "device-memory-full";
    case Errc::malformed_blob: return "malformed-blob";
    case Errc::unsupported_operation: return "unsupported-operation";
    case Errc::singular_matrix: return "singular-matrix";
    case Errc::degenerate_range: return "degenerate-range";
    case Errc::planning_error: return "planning-error";
    case Errc::usage_error: return "usage-error";
    case Errc::saturation: return "saturation";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace tpuemu
