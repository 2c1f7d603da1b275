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
#include <optional>
#include <span>

#include "tpuemu/core/oracle.hpp"
#include "tpuemu/core/tensor.hpp"
#include "tpuemu/device/quantized_block.hpp"

namespace tpuemu {

// Quantization of one operand or result. Non-negative ranges map [0, B] onto
// codes 0..255 with zero point 0. Signed ranges spread [-B, B] over 255 steps
// with zero point 128, so +B rounds onto code 255 from half a step above.
struct QuantParams {
  double scale = 1.0;  // 1 / bound from the per-kind formula
  std::uint8_t zero_point = 0;
  double range_min = 0.0;
  double range_max = 0.0;
  float code_scale = 1.0f;  // codes per real unit actually used
  bool degenerate = false;  // zero-width range, unit code scale
};

struct QuantFlags {
  // Floor the code scale to an integer when the data are integers, so that
  // integer values and integer results survive quantization exactly.
  bool preserve_integers = true;
  std::optional<std::pair<double, double>> range_a;
  std::optional<std::pair<double, double>> range_b;
  // Inner-dimension tile edge for fully_connected / gemm; default is the
  // profile's arithmetic tile.
  std::optional<Index> inner_tile;

  friend bool operator==(const QuantFlags&, const QuantFlags&) = default;
};

// Widens to include zero and applies the declared-range override.
RangeStats declared_stats(const RangeStats& measured,
                          const std::optional<std::pair<double, double>>& override_range);

// 1/|max - min| for one input tensor.
QuantParams input_params(const RangeStats& s, bool preserve_integers);

// Worst-case |output| of one instruction, from the input widths.
double output_bound(OpKind kind, const RangeStats& a, const RangeStats* b, Index inner_dim);

// Output quantization for one instruction. inner_dim is the number of
// accumulated products for conv2d / fully_connected and ignored otherwise.
QuantParams scale_factor(OpKind kind, const RangeStats& a, const RangeStats* b, Index inner_dim,
                         bool preserve_integers = false);

// Bound after applying `kinds` in sequence, each step combining the running
// value with an operand of equal bound. Starts from inputs of width `width`.
struct ChainStep {
  OpKind kind;
  Index inner_dim = 1;
};
double chain_bound(std::span<const ChainStep> steps, double width);

QuantizedBlock quantize(const HostTensor& t, const QuantParams& qp,
                        std::uint64_t* clamped = nullptr);

}  // namespace tpuemu
