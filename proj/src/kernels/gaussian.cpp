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

HostTensor gaussian(Runtime& rt, const HostTensor& a, const HostTensor& b) {
  check_square(a, "gaussian matrix");
  check_finite(a, "gaussian matrix");
  check_finite(b, "right-hand side");
  const Index n = a.rows();
  if (b.size() != n) raise(Errc::invalid_input, "right-hand side length differs from matrix order");

  HostTensor aug(n, n + 1);
  aug.leftCols(n) = a;
  aug.col(n) = b.reshaped(n, 1);

  detail::run_task(rt, [&] {
    for (Index k = 0; k + 1 < n; ++k) {
      const double pivot = aug(k, k);
      if (pivot == 0.0) raise(Errc::singular_matrix, "zero pivot at row " + std::to_string(k));
      const Index rows = n - k - 1, cols = n + 1 - k;
      // Row i loses factor_i times the pivot row: one mul and one sub over
      // the trailing block, with factors and pivot row broadcast.
      HostTensor factors(rows, cols);
      factors.colwise() = aug.col(k).tail(rows) / pivot;
      HostTensor pivot_row(rows, cols);
      pivot_row.rowwise() = aug.row(k).tail(cols);
      const HostTensor scaled = detail::run_op(rt, Operator::mul, factors, &pivot_row);
      const HostTensor trailing = aug.bottomRightCorner(rows, cols);
      aug.bottomRightCorner(rows, cols) = detail::run_op(rt, Operator::sub, trailing, &scaled);
    }
  });

  HostTensor x(n, 1);
  for (Index i = n - 1; i >= 0; --i) {
    if (aug(i, i) == 0.0) raise(Errc::singular_matrix, "zero pivot at row " + std::to_string(i));
    const double s = aug(i, n) - aug.row(i).segment(i + 1, n - i - 1).dot(x.col(0).tail(n - i - 1));
    x(i, 0) = s / aug(i, i);
  }
  return x;
}

}  // namespace tpuemu
