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
namespace {

// Trailing updates narrower than this use fully_connected instead of gemm.
constexpr Index kGemmMinEdge = 8;

}  // namespace

LuFactors lud(Runtime& rt, const HostTensor& a) {
  check_square(a, "lud input");
  check_finite(a, "lud input");
  const Index n = a.rows();
  HostTensor work = a;
  LuFactors f{HostTensor::Identity(n, n), HostTensor::Zero(n, n)};

  detail::run_task(rt, [&] {
    for (Index k = 0; k < n; ++k) {
      const Index m = n - k - 1;
      const HostTensor trailing = work.bottomRightCorner(m + 1, m + 1);
      OpDesc crop;
      crop.window = {0, 0, 1, 1};
      const double pivot = detail::run_op(rt, Operator::crop, trailing, nullptr, crop)(0, 0);
      if (pivot == 0.0) raise(Errc::singular_matrix, "zero pivot at row " + std::to_string(k));
      f.upper(k, k) = pivot;
      if (m == 0) break;

      crop.window = {0, 1, 1, m};
      const HostTensor top_right = detail::run_op(rt, Operator::crop, trailing, nullptr, crop);
      crop.window = {1, 0, m, 1};
      const HostTensor bottom_left = detail::run_op(rt, Operator::crop, trailing, nullptr, crop);

      const HostTensor column = bottom_left / pivot;
      f.upper.block(k, k + 1, 1, m) = top_right;
      f.lower.block(k + 1, k, m, 1) = column;
      const Operator op = m < kGemmMinEdge ? Operator::fully_connected : Operator::gemm;
      work.bottomRightCorner(m, m) -= detail::run_op(rt, op, column, &top_right);
    }
  });
  return f;
}

}  // namespace tpuemu
