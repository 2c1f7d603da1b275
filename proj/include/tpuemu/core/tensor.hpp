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
#include <random>

#include <Eigen/Dense>

namespace tpuemu {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using HostTensor = Matrix<double>;
using CodeMatrix = Matrix<std::uint8_t>;

inline constexpr std::uint64_t kDefaultSeed = 42;

struct TensorShape {
  Index rows = 1;
  Index cols = 1;

  Index count() const { return rows * cols; }
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

template <typename Derived>
TensorShape shape_of(const Eigen::DenseBase<Derived>& m) {
  return {m.rows(), m.cols()};
}

// Throws invalid-input if any element is NaN or infinite.
void check_finite(const HostTensor& t, const char* what);

struct RangeStats {
  double min = 0.0;
  double max = 0.0;
  bool sampled = false;
  // Every scanned value is an exact integer.
  bool integral = false;

  double width() const { return max - min; }
};

// Full scan at fraction 1; otherwise a seeded sample of ceil(fraction * n) elements.
RangeStats range_stats(const HostTensor& t, double sample_fraction = 1.0,
                       std::uint64_t seed = kDefaultSeed);

// 1 below 2^20 elements, 0.01 above.
double default_sample_fraction(Index element_count);

HostTensor uniform_tensor(Index rows, Index cols, double lo, double hi, std::mt19937_64& rng);

}  // namespace tpuemu
