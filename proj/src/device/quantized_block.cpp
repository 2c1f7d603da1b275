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

#include "tpuemu/device/quantized_block.hpp"

#include <cmath>

#include "tpuemu/core/error.hpp"

namespace tpuemu {

double round_half_away(double v) { return std::round(v); }

namespace {

// Absorbs double rounding in real * scale at exactly half a step past the edge.
constexpr double kEdgeSlack = 1e-9;

}  // namespace

std::uint8_t encode_code(double real, double scale, std::uint8_t zero_point, bool* clamped) {
  const double position = real * scale + zero_point;
  if (clamped) *clamped = !(position >= -0.5 - kEdgeSlack && position <= 255.5 + kEdgeSlack);
  const double code = round_half_away(real * scale) + zero_point;
  if (code >= 0.0 && code <= 255.0) return static_cast<std::uint8_t>(code);
  return code < 0.0 || std::isnan(code) ? 0 : 255;
}

HostTensor dequantize(const QuantizedBlock& b) {
  return ((b.codes.cast<double>().array() - static_cast<double>(b.zero_point)) / double{b.scale}).matrix();
}

void check_block(const QuantizedBlock& b) {
  if (!(b.scale > 0.0f) || !std::isfinite(b.scale))
    raise(Errc::invalid_input, "block scale must be positive and finite");
  if (b.codes.size() == 0) raise(Errc::invalid_input, "block is empty");
}

}  // namespace tpuemu
