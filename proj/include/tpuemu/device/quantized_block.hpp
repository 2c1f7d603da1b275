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

#include <cstddef>
#include <cstdint>

#include "tpuemu/core/tensor.hpp"

namespace tpuemu {

// 8-bit tile as held in device memory. real = (code - zero_point) / scale.
struct QuantizedBlock {
  CodeMatrix codes;
  float scale = 1.0f;  // codes per real unit
  std::uint8_t zero_point = 0;

  TensorShape shape() const { return shape_of(codes); }
  std::size_t bytes() const { return static_cast<std::size_t>(codes.size()); }
  double value(Index r, Index c) const { return (codes(r, c) - static_cast<double>(zero_point)) / scale; }

  friend bool operator==(const QuantizedBlock& a, const QuantizedBlock& b) {
    return a.scale == b.scale && a.zero_point == b.zero_point && a.codes == b.codes;
  }
};

// Round half away from zero.
double round_half_away(double v);

// zero_point + round(real * scale), clamped to [0, 255]. Sets *clamped when
// the value lies more than half a step outside the code range, i.e. when
// clamping loses more than ordinary rounding would.
std::uint8_t encode_code(double real, double scale, std::uint8_t zero_point, bool* clamped);

HostTensor dequantize(const QuantizedBlock& b);

// Throws invalid-input unless scale is positive and finite.
void check_block(const QuantizedBlock& b);

}  // namespace tpuemu
