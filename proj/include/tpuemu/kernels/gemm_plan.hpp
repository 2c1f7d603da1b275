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

#include "tpuemu/core/oracle.hpp"

namespace tpuemu {

// GEMM as one strided convolution. Row r of A becomes an s x s block
// (row-major, zero padded) at rows [r*s, r*s + s) of the stacked input;
// column c of B becomes kernel c, filled in the same order. With stride
// (s, s) every window sees exactly one row block, so output (r, c) is the
// dot product of A's row r with B's column c.
struct GemmPlan {
  Index m = 1;
  Index n = 1;
  Index k = 1;
  Index edge = 1;  // s = ceil(sqrt(n))

  static GemmPlan make(Index m, Index n, Index k);

  HostTensor stack_rows(const HostTensor& a) const;
  HostTensor kernel_set(const HostTensor& b) const;
  OpDesc conv_op() const;
};

Index ceil_sqrt(Index n);

}  // namespace tpuemu
