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

#include <cmath>
#include <initializer_list>
#include <random>

#include "tpuemu/core/tensor.hpp"

namespace testing {

using tpuemu::HostTensor;
using tpuemu::Index;

inline HostTensor mat(std::initializer_list<std::initializer_list<double>> rows) {
  HostTensor m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline HostTensor random_matrix(Index rows, Index cols, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  HostTensor m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

inline HostTensor random_integers(Index rows, Index cols, int lo, int hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(lo, hi);
  HostTensor m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

// Triple loop, kept separate from every library code path.
inline HostTensor brute_gemm(const HostTensor& a, const HostTensor& b) {
  HostTensor c = HostTensor::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < b.cols(); ++k)
      for (Index j = 0; j < a.cols(); ++j) c(i, k) += a(i, j) * b(j, k);
  return c;
}

inline double max_relative_error(const HostTensor& ref, const HostTensor& got) {
  double worst = 0.0;
  const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
  for (Index i = 0; i < ref.size(); ++i)
    worst = std::max(worst, std::abs(ref.data()[i] - got.data()[i]) / scale);
  return worst;
}

}  // namespace testing
