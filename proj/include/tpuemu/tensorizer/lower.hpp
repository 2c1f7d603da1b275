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
#include <cstdint>
#include <string_view>
#include <vector>

#include "tpuemu/device/device.hpp"
#include "tpuemu/tensorizer/quantize.hpp"

namespace tpuemu {

// Programmer-visible operations. Everything except gemm maps to one device
// instruction kind; gemm lowers to conv2d through GemmPlan.
enum class Operator : std::uint8_t {
  add, sub, mul, tanh, relu, mean, max, crop, ext, fully_connected, conv2d, gemm,
};

const char* to_string(Operator op);
OpKind device_kind(Operator op);

struct Request {
  Operator op = Operator::add;
  std::array<const HostTensor*, 2> inputs{};
  // Stride / kernel count for conv2d, window for crop, target for ext.
  OpDesc params{};
  QuantFlags flags{};
};

enum class LowerMode { quantized, oracle };
enum class Aggregation { none, sum_partials, reduce_partials };

struct OperandTile {
  BlockId id = 0;
  HostTensor real;
  QuantizedBlock block;  // empty in oracle mode
  QuantParams params;
};

// Copies rows x cols of an instruction's output at (src_row, src_col) into
// the result at (dst_row, dst_col). For mean, `weight` multiplies the value.
struct Placement {
  Index src_row = 0, src_col = 0;
  Index dst_row = 0, dst_col = 0;
  Index rows = 1, cols = 1;
  double weight = 1.0;
};

struct TileCoord {
  Index row = 0;
  Index col = 0;
  Index inner = 0;
};

struct ProgramInstruction {
  Instruction ins;
  std::array<std::size_t, 2> operand_index{};
  TileCoord coord;
  std::vector<Placement> placements;
};

struct InstructionProgram {
  Operator op = Operator::add;
  QuantFlags flags;
  std::vector<OperandTile> operands;
  std::vector<ProgramInstruction> instructions;
  Aggregation aggregation = Aggregation::none;
  TensorShape output_shape;
  std::size_t expected_instructions = 0;
  std::uint64_t input_clamps = 0;
  // Sum of weights for mean (the logical element count).
  double reduce_denominator = 1.0;

  const OperandTile& operand(const ProgramInstruction& p, int i) const {
    return operands[p.operand_index[static_cast<std::size_t>(i)]];
  }
};

InstructionProgram lower(const Request& request, const DeviceProfile& profile = {},
                         LowerMode mode = LowerMode::quantized);

// Whole-request result from per-instruction outputs (already dequantized).
HostTensor assemble(const InstructionProgram& program, std::span<const HostTensor> outputs);

// Per-instruction float64 execution followed by assembly.
HostTensor replay_with_oracle(const InstructionProgram& program);

// Float64 result of the request without any lowering.
HostTensor oracle_request(const Request& request);

// Runs the program on one device in order, loading operands as needed and
// evicting everything afterwards.
HostTensor execute_program(const InstructionProgram& program, Device& device);

BlockId next_block_id();

}  // namespace tpuemu
