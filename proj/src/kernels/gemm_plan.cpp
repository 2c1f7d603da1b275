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

#include "tpuemu/kernels/gemm_plan.hpp"

#include <cmath>

#include "tpuemu/core/error.hpp"

namespace tpuemu {

Index ceil_sqrt(Index n) {
  auto s = static_cast<Index>(std::sqrt(static_cast<double>(n)));
  while (s * s < n) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= n) --s;
  return s;
}

GemmPlan GemmPlan::make(Index m, Index n, Index k) {
  if (m < 1 || n < 1 || k < 1) raise(Errc::invalid_input, "gemm dimensions must be positive");
  return {m, n, k, ceil_sqrt(n)};
}

HostTensor GemmPlan::stack_rows(const HostTensor& a) const {
  if (a.rows() != m || a.cols() != n) raise(Errc::invalid_input, "A does not match the plan");
  HostTensor out = HostTensor::Zero(m * edge, edge);
  for (Index r = 0; r < m; ++r)
    for (Index j = 0; j < n; ++j) out(r * edge + j / edge, j % edge) = a(r, j);
  return out;
}

HostTensor GemmPlan::kernel_set(const HostTensor& b) const {
  if (b.rows() != n || b.cols() != k) raise(Errc::invalid_input, "B does not match the plan");
  HostTensor out = HostTensor::Zero(k * edge, edge);
  for (Index c = 0; c < k; ++c)
    for (Index j = 0; j < n; ++j) out(c * edge + j / edge, j % edge) = b(j, c);
  return out;
}

OpDesc GemmPlan::conv_op() const {
  OpDesc op;
  op.kind = OpKind::conv2d;
  op.stride = {edge, edge};
  op.kernel_count = k;
  return op;
}

}  // namespace tpuemu
