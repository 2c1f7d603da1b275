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

#include "tpuemu/core/oracle.hpp"

#include <cmath>
#include <string>

#include "tpuemu/core/error.hpp"

namespace tpuemu {
namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

void expect_arity(const OpDesc& op, std::size_t n) {
  if (n != static_cast<std::size_t>(arity(op.kind)))
    raise(Errc::invalid_input, std::string(to_string(op.kind)) + " expects " +
                                   std::to_string(arity(op.kind)) + " operands");
}

HostTensor conv2d(const OpDesc& op, const HostTensor& in, const HostTensor& kernels) {
  const Index kr = kernels.rows() / op.kernel_count;
  const Index kc = kernels.cols();
  const Index out_r = ceil_div(in.rows(), op.stride.rows);
  const Index out_c = ceil_div(in.cols(), op.stride.cols);
  HostTensor out = HostTensor::Zero(out_r, op.kernel_count * out_c);
  for (Index k = 0; k < op.kernel_count; ++k) {
    for (Index i = 0; i < out_r; ++i) {
      for (Index j = 0; j < out_c; ++j) {
        const Index r0 = i * op.stride.rows;
        const Index c0 = j * op.stride.cols;
        double acc = 0.0;
        for (Index p = 0; p < kr && r0 + p < in.rows(); ++p)
          for (Index q = 0; q < kc && c0 + q < in.cols(); ++q)
            acc += in(r0 + p, c0 + q) * kernels(k * kr + p, q);
        out(i, k * out_c + j) = acc;
      }
    }
  }
  return out;
}

}  // namespace

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::conv2d: return "conv2d";
    case OpKind::fully_connected: return "fully_connected";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::crop: return "crop";
    case OpKind::ext: return "ext";
    case OpKind::mean: return "mean";
    case OpKind::max: return "max";
    case OpKind::tanh: return "tanh";
    case OpKind::relu: return "relu";
  }
  return "unknown";
}

std::optional<OpKind> parse_op_kind(std::string_view name) {
  for (OpKind k : kAllOpKinds)
    if (name == to_string(k)) return k;
  if (name == "fc") return OpKind::fully_connected;
  return std::nullopt;
}

bool is_pairwise(OpKind k) { return k == OpKind::add || k == OpKind::sub || k == OpKind::mul; }
bool is_reduce(OpKind k) { return k == OpKind::mean || k == OpKind::max; }
bool is_activation(OpKind k) { return k == OpKind::tanh || k == OpKind::relu; }
bool is_reshape(OpKind k) { return k == OpKind::crop || k == OpKind::ext; }

int arity(OpKind k) {
  return (k == OpKind::conv2d || k == OpKind::fully_connected || is_pairwise(k)) ? 2 : 1;
}

TensorShape output_shape(const OpDesc& op, std::span<const TensorShape> in) {
  if (in.size() != static_cast<std::size_t>(arity(op.kind)))
    raise(Errc::invalid_input, std::string(to_string(op.kind)) + ": wrong operand count");
  const TensorShape a = in[0];
  switch (op.kind) {
    case OpKind::conv2d: {
      const TensorShape k = in[1];
      if (op.stride.rows < 1 || op.stride.cols < 1) raise(Errc::invalid_shape, "stride must be >= 1");
      if (op.kernel_count < 1 || k.rows % op.kernel_count != 0)
        raise(Errc::invalid_shape, "kernel rows not divisible by kernel count");
      if (k.rows / op.kernel_count > a.rows || k.cols > a.cols)
        raise(Errc::invalid_shape, "kernel larger than input");
      return {ceil_div(a.rows, op.stride.rows), op.kernel_count * ceil_div(a.cols, op.stride.cols)};
    }
    case OpKind::fully_connected:
      if (a.cols != in[1].rows) raise(Errc::invalid_shape, "fully_connected inner dimension mismatch");
      return {a.rows, in[1].cols};
    case OpKind::add:
    case OpKind::sub:
    case OpKind::mul:
      if (a != in[1]) raise(Errc::invalid_shape, "pairwise operands differ in shape");
      return a;
    case OpKind::crop: {
      const Window& w = op.window;
      if (w.rows < 1 || w.cols < 1 || w.row < 0 || w.col < 0 || w.row + w.rows > a.rows ||
          w.col + w.cols > a.cols)
        raise(Errc::invalid_shape, "crop window out of bounds");
      return {w.rows, w.cols};
    }
    case OpKind::ext:
      if (op.target.rows < a.rows || op.target.cols < a.cols)
        raise(Errc::invalid_shape, "ext target smaller than source");
      return op.target;
    case OpKind::mean:
    case OpKind::max:
      return {1, 1};
    case OpKind::tanh:
    case OpKind::relu:
      return a;
  }
  raise(Errc::unsupported_operation, "unknown kind");
}

HostTensor oracle_execute(const OpDesc& op, std::span<const HostTensor> in) {
  expect_arity(op, in.size());
  TensorShape shapes[2];
  for (std::size_t i = 0; i < in.size(); ++i) shapes[i] = shape_of(in[i]);
  TensorShape out;
  try {
    out = output_shape(op, std::span<const TensorShape>(shapes, in.size()));
  } catch (const Error& e) {
    // Host callers see every shape problem as bad input.
    if (e.code() != Errc::invalid_shape) throw;
    raise(Errc::invalid_input, e.what());
  }
  const HostTensor& a = in[0];
  switch (op.kind) {
    case OpKind::conv2d: return conv2d(op, a, in[1]);
    case OpKind::fully_connected: return a * in[1];
    case OpKind::add: return a + in[1];
    case OpKind::sub: return a - in[1];
    case OpKind::mul: return a.cwiseProduct(in[1]);
    case OpKind::crop: return a.block(op.window.row, op.window.col, out.rows, out.cols);
    case OpKind::ext: {
      HostTensor r = HostTensor::Zero(out.rows, out.cols);
      r.topLeftCorner(a.rows(), a.cols()) = a;
      return r;
    }
    case OpKind::mean: return HostTensor::Constant(1, 1, a.mean());
    case OpKind::max: return HostTensor::Constant(1, 1, a.maxCoeff());
    case OpKind::tanh: return a.array().tanh().matrix();
    case OpKind::relu: return a.cwiseMax(0.0);
  }
  raise(Errc::unsupported_operation, "unknown kind");
}

HostTensor oracle_gemm(const HostTensor& a, const HostTensor& b) {
  if (a.cols() != b.rows()) raise(Errc::invalid_input, "gemm inner dimensions differ");
  return a * b;
}

HostTensor flip_kernel(const HostTensor& kernel) { return kernel.reverse(); }

HostTensor centered_input(const HostTensor& input, Index kernel_edge) {
  const Index h = kernel_edge / 2;
  HostTensor r = HostTensor::Zero(input.rows() + h, input.cols() + h);
  r.bottomRightCorner(input.rows(), input.cols()) = input;
  return r;
}

HostTensor oracle_centered_conv2d(const HostTensor& input, const HostTensor& kernel) {
  if (kernel.rows() != kernel.cols() || kernel.rows() % 2 == 0)
    raise(Errc::invalid_shape, "centred convolution needs a square odd-edge kernel");
  const Index h = kernel.rows() / 2;
  HostTensor out = HostTensor::Zero(input.rows(), input.cols());
  for (Index i = 0; i < input.rows(); ++i)
    for (Index j = 0; j < input.cols(); ++j)
      for (Index p = -h; p <= h; ++p)
        for (Index q = -h; q <= h; ++q) {
          const Index r = i + p, c = j + q;
          if (r < 0 || c < 0 || r >= input.rows() || c >= input.cols()) continue;
          out(i, j) += input(r, c) * kernel(h - p, h - q);
        }
  return out;
}

}  // namespace tpuemu
