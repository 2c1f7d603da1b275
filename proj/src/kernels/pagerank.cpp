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

HostTensor pagerank(Runtime& rt, const HostTensor& adjacency, int iterations, double damping) {
  check_square(adjacency, "adjacency");
  check_finite(adjacency, "adjacency");
  if (iterations < 0) raise(Errc::invalid_input, "iterations must be >= 0");
  const Index n = adjacency.rows();
  // (M x)^T = x^T M^T, so the transposed transition matrix is the model.
  const HostTensor model = column_normalize(adjacency).transpose();
  HostTensor x = HostTensor::Constant(1, n, 1.0 / static_cast<double>(n));
  detail::run_task(rt, [&] {
    for (int it = 0; it < iterations; ++it) {
      HostTensor next = damping * detail::run_op(rt, Operator::fully_connected, x, &model);
      next.array() += (1.0 - damping) / static_cast<double>(n);
      x = next / next.sum();
    }
  });
  return x.transpose();
}

}  // namespace tpuemu
