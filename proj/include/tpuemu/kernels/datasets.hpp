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

#include <cstdint>
#include <vector>

#include "tpuemu/core/apps.hpp"

// Seeded input generators for the bundled applications. The same seed always
// yields the same data.
namespace tpuemu::data {

// Largest magnitude allowed anywhere in the exact integer LU and elimination
// inputs, including intermediate trailing blocks. 11 * 11 still fits the
// signed 8-bit code range, so every device step stays exact.
inline constexpr double kExactLimit = 11.0;

HostTensor uniform(Index rows, Index cols, double lo, double hi, std::uint64_t seed);

// Dense weighted graph with weights in [0, 1).
HostTensor graph(Index n, std::uint64_t seed);

struct HotspotInput {
  LayerStack temperature;
  LayerStack power;
};
HotspotInput hotspot(Index rows, Index cols, Index layers, std::uint64_t seed);

// A = L * U with sparse unit-triangular {0, 1} factors, so elimination
// without pivoting stays on small integers.
HostTensor exact_lu_matrix(Index n, std::uint64_t seed);

struct LinearSystem {
  HostTensor a;
  HostTensor b;  // n x 1
  HostTensor x;  // n x 1, the exact solution
};
LinearSystem exact_linear_system(Index n, std::uint64_t seed);

struct BackpropData {
  BackpropNet net;
  std::vector<HostTensor> inputs;
  std::vector<HostTensor> targets;
};
BackpropData backprop(Index inputs, Index hidden, Index outputs, Index samples, std::uint64_t seed);

// Option rows in the kOptionColumns layout; the reference column holds the
// float64 price.
HostTensor options(Index count, std::uint64_t seed);

}  // namespace tpuemu::data
