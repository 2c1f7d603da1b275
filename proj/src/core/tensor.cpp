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

#include "tpuemu/core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpuemu/core/error.hpp"

namespace tpuemu {

void check_finite(const HostTensor& t, const char* what) {
  if (!t.allFinite()) raise(Errc::invalid_input, std::string(what) + " contains non-finite values");
}

RangeStats range_stats(const HostTensor& t, double sample_fraction, std::uint64_t seed) {
  if (t.size() == 0) raise(Errc::invalid_input, "range_stats of an empty tensor");
  if (!(sample_fraction > 0.0) || sample_fraction > 1.0)
    raise(Errc::invalid_input, "sample fraction must lie in (0, 1]");

  RangeStats s;
  s.integral = true;
  auto visit = [&s](double v) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
    s.integral = s.integral && v == std::nearbyint(v);
  };

  const Index n = t.size();
  const double* data = t.data();
  s.min = s.max = data[0];
  if (sample_fraction >= 1.0) {
    for (Index i = 0; i < n; ++i) visit(data[i]);
    return s;
  }

  const auto picks = static_cast<Index>(std::ceil(sample_fraction * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  s.min = s.max = data[pick(rng)];
  for (Index i = 0; i < picks; ++i) visit(data[pick(rng)]);
  s.sampled = true;
  return s;
}

double default_sample_fraction(Index element_count) {
  return element_count < (Index{1} << 20) ? 1.0 : 0.01;
}

HostTensor uniform_tensor(Index rows, Index cols, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  HostTensor t(rows, cols);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = dist(rng);
  return t;
}

}  // namespace tpuemu
