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

#include "tpuemu/device/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tpuemu/core/error.hpp"

namespace tpuemu {
namespace {

using Centered = Matrix<std::int32_t>;

Centered centered(const QuantizedBlock& b) {
  return b.codes.cast<std::int32_t>().array() - std::int32_t{b.zero_point};
}

}  // namespace

Device::Device(DeviceProfile profile) : profile_(std::move(profile)) { profile_.validate(); }

void Device::load(BlockId id, QuantizedBlock block) {
  check_block(block);
  if (blocks_.contains(id)) return;
  const std::size_t bytes = block.bytes();
  if (used_bytes_ + bytes > profile_.onchip_memory_bytes)
    raise(Errc::device_memory_full, "loading " + std::to_string(bytes) + " bytes with " +
                                        std::to_string(used_bytes_) + " of " +
                                        std::to_string(profile_.onchip_memory_bytes) + " in use");
  blocks_.emplace(id, std::move(block));
  used_bytes_ += bytes;
  clock_us_ += profile_.transfer_us(bytes);
  counters_.loads += 1;
  counters_.bytes_loaded += bytes;
  transfer_log_.push_back(id);
}

void Device::evict(BlockId id) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) return;
  used_bytes_ -= it->second.bytes();
  blocks_.erase(it);
}

void Device::clear() {
  blocks_.clear();
  used_bytes_ = 0;
}

const QuantizedBlock& Device::block(BlockId id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) raise(Errc::missing_operand, "block " + std::to_string(id) + " not loaded");
  return it->second;
}

void Device::advance_to(double clock_us) { clock_us_ = std::max(clock_us_, clock_us); }

TensorShape Device::validate(const Instruction& ins) const {
  TensorShape shapes[2];
  for (int i = 0; i < ins.operand_count(); ++i) shapes[i] = block(ins.operands[i]).shape();
  if (ins.op.kind == OpKind::fully_connected && shapes[0].rows != 1)
    raise(Errc::invalid_shape, "fully_connected expects a 1xN vector");
  if (!is_reshape(ins.op.kind) && (!(ins.out_scale > 0.0f) || !std::isfinite(ins.out_scale)))
    raise(Errc::invalid_input, "output scale must be positive and finite");
  return output_shape(ins.op, std::span<const TensorShape>(shapes, ins.operand_count()));
}

TensorShape Device::account(const Instruction& ins) {
  const TensorShape out = validate(ins);
  clock_us_ += profile_.instruction_us(ins.op.kind);
  counters_.instructions += 1;
  return out;
}

QuantizedBlock Device::execute(const Instruction& ins) {
  validate(ins);
  QuantizedBlock out = run(ins);
  clock_us_ += profile_.instruction_us(ins.op.kind);
  counters_.instructions += 1;
  return out;
}

std::uint8_t Device::requantize(double real, float scale, std::uint8_t zero_point) {
  bool clamped = false;
  const std::uint8_t code = encode_code(real, scale, zero_point, &clamped);
  if (clamped) counters_.saturation_events += 1;
  return code;
}

QuantizedBlock Device::run(const Instruction& ins) {
  const OpDesc& op = ins.op;
  const QuantizedBlock& a = block(ins.operands[0]);
  QuantizedBlock out;
  out.scale = ins.out_scale;
  out.zero_point = ins.out_zero_point;

  switch (op.kind) {
    case OpKind::conv2d:
    case OpKind::fully_connected: {
      const QuantizedBlock& b = block(ins.operands[1]);
      const Centered ca = centered(a);
      const Centered cb = centered(b);
      const double product_scale = double{a.scale} * double{b.scale};
      constexpr std::int64_t kAccMax = std::numeric_limits<std::int32_t>::max();
      auto finish = [&](std::int64_t acc) {
        if (acc > kAccMax || acc < -kAccMax - 1) {
          counters_.overflow_events += 1;
          acc = std::clamp<std::int64_t>(acc, -kAccMax - 1, kAccMax);
        }
        return requantize(static_cast<double>(acc) / product_scale, out.scale, out.zero_point);
      };

      if (op.kind == OpKind::fully_connected) {
        out.codes.resize(1, b.codes.cols());
        for (Index j = 0; j < b.codes.cols(); ++j) {
          std::int64_t acc = 0;
          for (Index p = 0; p < ca.cols(); ++p) acc += std::int64_t{ca(0, p)} * cb(p, j);
          out.codes(0, j) = finish(acc);
        }
        return out;
      }

      const Index kr = cb.rows() / op.kernel_count;
      const Index kc = cb.cols();
      const Index out_r = (ca.rows() + op.stride.rows - 1) / op.stride.rows;
      const Index out_c = (ca.cols() + op.stride.cols - 1) / op.stride.cols;
      out.codes.resize(out_r, op.kernel_count * out_c);
      for (Index k = 0; k < op.kernel_count; ++k) {
        for (Index i = 0; i < out_r; ++i) {
          const Index r0 = i * op.stride.rows;
          const Index rows = std::min(kr, ca.rows() - r0);
          for (Index j = 0; j < out_c; ++j) {
            const Index c0 = j * op.stride.cols;
            const Index cols = std::min(kc, ca.cols() - c0);
            std::int64_t acc = 0;
            for (Index p = 0; p < rows; ++p) {
              const std::int32_t* in_row = &ca(r0 + p, c0);
              const std::int32_t* k_row = &cb(k * kr + p, 0);
              std::int64_t row_acc = 0;
              for (Index q = 0; q < cols; ++q) row_acc += std::int64_t{in_row[q]} * k_row[q];
              acc += row_acc;
            }
            out.codes(i, k * out_c + j) = finish(acc);
          }
        }
      }
      return out;
    }

    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul: {
      const QuantizedBlock& b = block(ins.operands[1]);
      out.codes.resize(a.codes.rows(), a.codes.cols());
      for (Index i = 0; i < a.codes.rows(); ++i) {
        for (Index j = 0; j < a.codes.cols(); ++j) {
          const double x = a.value(i, j), y = b.value(i, j);
          const double r = op.kind == OpKind::add ? x + y : op.kind == OpKind::sub ? x - y : x * y;
          out.codes(i, j) = requantize(r, out.scale, out.zero_point);
        }
      }
      return out;
    }

    case OpKind::mean:
    case OpKind::max: {
      const HostTensor v = dequantize(a);
      const double r = op.kind == OpKind::mean ? v.mean() : v.maxCoeff();
      out.codes.resize(1, 1);
      out.codes(0, 0) = requantize(r, out.scale, out.zero_point);
      return out;
    }

    case OpKind::tanh:
    case OpKind::relu: {
      out.codes.resize(a.codes.rows(), a.codes.cols());
      for (Index i = 0; i < a.codes.rows(); ++i) {
        for (Index j = 0; j < a.codes.cols(); ++j) {
          const double x = a.value(i, j);
          const double r = op.kind == OpKind::tanh ? std::tanh(x) : std::max(x, 0.0);
          out.codes(i, j) = requantize(r, out.scale, out.zero_point);
        }
      }
      return out;
    }

    case OpKind::crop:
      out.scale = a.scale;
      out.zero_point = a.zero_point;
      out.codes = a.codes.block(op.window.row, op.window.col, op.window.rows, op.window.cols);
      return out;

    case OpKind::ext:
      out.scale = a.scale;
      out.zero_point = a.zero_point;
      out.codes = CodeMatrix::Constant(op.target.rows, op.target.cols, a.zero_point);
      out.codes.topLeftCorner(a.codes.rows(), a.codes.cols()) = a.codes;
      return out;
  }
  raise(Errc::unsupported_operation, "unknown instruction kind");
}

QuantizedBlock Device::exec_conv2d(BlockId input, BlockId kernels, Stride stride,
                                   Index kernel_count, float out_scale,
                                   std::uint8_t out_zero_point) {
  Instruction ins;
  ins.op.kind = OpKind::conv2d;
  ins.op.stride = stride;
  ins.op.kernel_count = kernel_count;
  ins.operands = {input, kernels};
  ins.out_scale = out_scale;
  ins.out_zero_point = out_zero_point;
  return execute(ins);
}

QuantizedBlock Device::exec_fully_connected(BlockId vector, BlockId model, float out_scale,
                                            std::uint8_t out_zero_point) {
  Instruction ins;
  ins.op.kind = OpKind::fully_connected;
  ins.operands = {vector, model};
  ins.out_scale = out_scale;
  ins.out_zero_point = out_zero_point;
  return execute(ins);
}

QuantizedBlock Device::exec_pairwise(OpKind kind, BlockId a, BlockId b, float out_scale,
                                     std::uint8_t out_zero_point) {
  if (!is_pairwise(kind)) raise(Errc::unsupported_operation, "not a pairwise kind");
  Instruction ins;
  ins.op.kind = kind;
  ins.operands = {a, b};
  ins.out_scale = out_scale;
  ins.out_zero_point = out_zero_point;
  return execute(ins);
}

QuantizedBlock Device::exec_reduce(OpKind kind, BlockId a, float out_scale,
                                   std::uint8_t out_zero_point) {
  if (!is_reduce(kind)) raise(Errc::unsupported_operation, "not a reduce kind");
  Instruction ins;
  ins.op.kind = kind;
  ins.operands = {a, 0};
  ins.out_scale = out_scale;
  ins.out_zero_point = out_zero_point;
  return execute(ins);
}

QuantizedBlock Device::exec_activation(OpKind kind, BlockId a, float out_scale,
                                       std::uint8_t out_zero_point) {
  if (!is_activation(kind)) raise(Errc::unsupported_operation, "not an activation kind");
  Instruction ins;
  ins.op.kind = kind;
  ins.operands = {a, 0};
  ins.out_scale = out_scale;
  ins.out_zero_point = out_zero_point;
  return execute(ins);
}

QuantizedBlock Device::exec_crop(BlockId a, Window window) {
  Instruction ins;
  ins.op.kind = OpKind::crop;
  ins.op.window = window;
  ins.operands = {a, 0};
  return execute(ins);
}

QuantizedBlock Device::exec_ext(BlockId a, TensorShape target) {
  Instruction ins;
  ins.op.kind = OpKind::ext;
  ins.op.target = target;
  ins.operands = {a, 0};
  return execute(ins);
}

}  // namespace tpuemu
