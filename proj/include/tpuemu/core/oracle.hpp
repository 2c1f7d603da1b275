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
#include <optional>
#include <span>
#include <string_view>

#include "tpuemu/core/tensor.hpp"

namespace tpuemu {

enum class OpKind : std::uint8_t {
  conv2d,
  fully_connected,
  add,
  sub,
  mul,
  crop,
  ext,
  mean,
  max,
  tanh,
  relu,
};

inline constexpr std::array<OpKind, 11> kAllOpKinds = {
    OpKind::conv2d, OpKind::fully_connected, OpKind::add,  OpKind::sub,
    OpKind::mul,    OpKind::crop,            OpKind::ext,  OpKind::mean,
    OpKind::max,    OpKind::tanh,            OpKind::relu,
};

const char* to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view name);

bool is_pairwise(OpKind kind);
bool is_reduce(OpKind kind);
bool is_activation(OpKind kind);
bool is_reshape(OpKind kind);
int arity(OpKind kind);

struct Stride {
  Index rows = 1;
  Index cols = 1;
};

struct Window {
  Index row = 0;
  Index col = 0;
  Index rows = 1;
  Index cols = 1;
};

// One device-level operation. conv2d takes `kernel_count` kernels stacked
// vertically in its second operand; output column block k holds kernel k.
struct OpDesc {
  OpKind kind = OpKind::add;
  Stride stride{};
  Index kernel_count = 1;
  Window window{};
  TensorShape target{};
};

TensorShape output_shape(const OpDesc& op, std::span<const TensorShape> inputs);

// Exact float64 semantics of each device operation. fully_connected accepts
// any number of input rows and treats each as an independent vector.
HostTensor oracle_execute(const OpDesc& op, std::span<const HostTensor> inputs);

HostTensor oracle_gemm(const HostTensor& a, const HostTensor& b);

// Kernel rotated by 180 degrees.
HostTensor flip_kernel(const HostTensor& kernel);

// Input shifted down-right by floor(L/2) so a top-left correlation with
// flip_kernel(k) reproduces a centred convolution with k after cropping.
HostTensor centered_input(const HostTensor& input, Index kernel_edge);

// Direct centred convolution with a 180-degree rotated kernel, zero padded,
// same-size output. Square odd-edge kernels only.
HostTensor oracle_centered_conv2d(const HostTensor& input, const HostTensor& kernel);

}  // namespace tpuemu
