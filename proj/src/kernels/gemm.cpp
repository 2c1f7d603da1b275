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

#include "common.hpp"

namespace tpuemu {
namespace detail {

TensorShape result_shape(Operator op, const HostTensor& a, const HostTensor* b, const OpDesc& params) {
  switch (op) {
    case Operator::gemm:
    case Operator::fully_connected:
      return {a.rows(), b->cols()};
    case Operator::mean:
    case Operator::max:
      return {1, 1};
    default: {
      OpDesc d = params;
      d.kind = device_kind(op);
      const TensorShape shapes[2] = {shape_of(a), b ? shape_of(*b) : TensorShape{}};
      return output_shape(d, std::span<const TensorShape>(shapes, b ? 2 : 1));
    }
  }
}

HostTensor run_op(Runtime& rt, Operator op, const HostTensor& a, const HostTensor* b,
                  const OpDesc& params, const QuantFlags& flags) {
  const TensorShape out = result_shape(op, a, b, params);
  BufferRef in[2];
  in[0] = rt.create_buffer(a);
  if (b) in[1] = rt.create_buffer(*b);
  const BufferRef res = rt.create_buffer(rt.alloc_dimension(out.rows, out.cols));
  const std::span<const BufferRef> inputs(in, b ? 2 : 1);
  try {
    rt.invoke_operator(op, flags, inputs, res, params);
  } catch (...) {
    for (BufferRef r : inputs) rt.release_buffer(r);
    rt.release_buffer(res);
    throw;
  }
  HostTensor r = rt.read_buffer(res);
  for (BufferRef x : inputs) rt.release_buffer(x);
  rt.release_buffer(res);
  return r;
}

}  // namespace detail

HostTensor tpu_gemm(Runtime& rt, const HostTensor& a, const HostTensor& b, const QuantFlags& flags) {
  if (a.cols() != b.rows()) raise(Errc::invalid_input, "gemm inner dimensions differ");
  HostTensor c;
  detail::run_task(rt, [&] { c = detail::run_op(rt, Operator::gemm, a, &b, {}, flags); });
  return c;
}

}  // namespace tpuemu
