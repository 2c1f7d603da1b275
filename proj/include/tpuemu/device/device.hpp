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
#include <unordered_map>
#include <vector>

#include "tpuemu/device/profile.hpp"
#include "tpuemu/device/quantized_block.hpp"

namespace tpuemu {

using BlockId = std::uint64_t;

struct Instruction {
  OpDesc op;
  std::array<BlockId, 2> operands{};
  // Output quantization; reshape kinds keep the input's instead.
  float out_scale = 1.0f;
  std::uint8_t out_zero_point = 0;

  int operand_count() const { return arity(op.kind); }
};

struct DeviceCounters {
  std::uint64_t instructions = 0;
  std::uint64_t saturation_events = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t loads = 0;
  std::uint64_t bytes_loaded = 0;
};

// One emulated accelerator. Single owner; not thread-safe.
class Device {
 public:
  explicit Device(DeviceProfile profile = {});

  // Advances the clock by the transfer time. Loading a resident id is a
  // no-op. Throws device-memory-full without changing state.
  void load(BlockId id, QuantizedBlock block);
  void evict(BlockId id);
  void clear();
  bool resident(BlockId id) const { return blocks_.contains(id); }
  const QuantizedBlock& block(BlockId id) const;

  QuantizedBlock execute(const Instruction& ins);
  // Advances the clock and validates operands without computing codes.
  TensorShape account(const Instruction& ins);

  QuantizedBlock exec_conv2d(BlockId input, BlockId kernels, Stride stride, Index kernel_count,
                             float out_scale, std::uint8_t out_zero_point);
  QuantizedBlock exec_fully_connected(BlockId vector, BlockId model, float out_scale,
                                      std::uint8_t out_zero_point);
  QuantizedBlock exec_pairwise(OpKind kind, BlockId a, BlockId b, float out_scale,
                               std::uint8_t out_zero_point);
  QuantizedBlock exec_reduce(OpKind kind, BlockId a, float out_scale, std::uint8_t out_zero_point);
  QuantizedBlock exec_activation(OpKind kind, BlockId a, float out_scale,
                                 std::uint8_t out_zero_point);
  QuantizedBlock exec_crop(BlockId a, Window window);
  QuantizedBlock exec_ext(BlockId a, TensorShape target);

  // Spends simulated time without work, e.g. waiting on another device.
  void advance_to(double clock_us);

  const DeviceProfile& profile() const { return profile_; }
  double clock_us() const { return clock_us_; }
  std::size_t used_bytes() const { return used_bytes_; }
  const DeviceCounters& counters() const { return counters_; }
  const std::vector<BlockId>& transfer_log() const { return transfer_log_; }

 private:
  TensorShape validate(const Instruction& ins) const;
  QuantizedBlock run(const Instruction& ins);
  std::uint8_t requantize(double real, float scale, std::uint8_t zero_point);

  DeviceProfile profile_;
  std::unordered_map<BlockId, QuantizedBlock> blocks_;
  std::size_t used_bytes_ = 0;
  double clock_us_ = 0.0;
  DeviceCounters counters_;
  std::vector<BlockId> transfer_log_;
};

}  // namespace tpuemu
