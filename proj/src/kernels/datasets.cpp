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

#include "tpuemu/kernels/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tpuemu/core/error.hpp"

namespace tpuemu::data {
namespace {

constexpr int kMaxAttempts = 64;

HostTensor sparse_unit_lower(Index n, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution pick(density);
  HostTensor l = HostTensor::Identity(n, n);
  for (Index i = 1; i < n; ++i)
    for (Index j = 0; j < i; ++j)
      if (pick(rng)) l(i, j) = 1.0;
  return l;
}

// Checks every trailing block and multiplier that plain elimination visits.
bool elimination_within_limit(HostTensor m, Index cols) {
  const Index n = m.rows();
  for (Index k = 0; k < n; ++k) {
    if (m.rightCols(cols - k).bottomRows(n - k).cwiseAbs().maxCoeff() > kExactLimit) return false;
    if (m(k, k) != 1.0) return false;
    for (Index i = k + 1; i < n; ++i) m.row(i).tail(cols - k) -= m(i, k) * m.row(k).tail(cols - k);
  }
  return true;
}

HostTensor lu_candidate(Index n, std::mt19937_64& rng) {
  // Expected entry of L * U is about n * density^2; aim for 1.5.
  const double density = std::min(0.5, std::sqrt(1.5 / static_cast<double>(std::max<Index>(n, 1))));
  const HostTensor l = sparse_unit_lower(n, density, rng);
  const HostTensor u = sparse_unit_lower(n, density, rng).transpose();
  return l * u;
}

void check_size(Index n) {
  if (n < 1) raise(Errc::invalid_input, "size must be positive");
}

}  // namespace

HostTensor uniform(Index rows, Index cols, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return uniform_tensor(rows, cols, lo, hi, rng);
}

HostTensor graph(Index n, std::uint64_t seed) {
  check_size(n);
  return uniform(n, n, 0.0, 1.0, seed);
}

HotspotInput hotspot(Index rows, Index cols, Index layers, std::uint64_t seed) {
  if (rows < 3 || cols < 3 || layers < 1) raise(Errc::invalid_input, "hotspot grid too small");
  std::mt19937_64 rng(seed);
  HotspotInput in;
  for (Index z = 0; z < layers; ++z) {
    in.temperature.push_back(uniform_tensor(rows, cols, 320.0, 340.0, rng));
    in.power.push_back(uniform_tensor(rows, cols, 0.0, 0.5, rng));
  }
  return in;
}

HostTensor exact_lu_matrix(Index n, std::uint64_t seed) {
  check_size(n);
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    HostTensor a = lu_candidate(n, rng);
    if (elimination_within_limit(a, n)) return a;
  }
  raise(Errc::invalid_input, "no exact LU matrix of order " + std::to_string(n) + " within the limit");
}

LinearSystem exact_linear_system(Index n, std::uint64_t seed) {
  check_size(n);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution pick(std::min(1.0, 2.0 / static_cast<double>(n)));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    LinearSystem s;
    s.a = lu_candidate(n, rng);
    s.x = HostTensor::Zero(n, 1);
    for (Index i = 0; i < n; ++i)
      if (pick(rng)) s.x(i, 0) = 1.0;
    s.x(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)), 0) = 1.0;
    s.b = s.a * s.x;
    HostTensor aug(n, n + 1);
    aug << s.a, s.b;
    if (elimination_within_limit(aug, n + 1)) return s;
  }
  raise(Errc::invalid_input, "no exact linear system of order " + std::to_string(n) + " within the limit");
}

BackpropData backprop(Index inputs, Index hidden, Index outputs, Index samples, std::uint64_t seed) {
  if (inputs < 1 || hidden < 1 || outputs < 1 || samples < 1)
    raise(Errc::invalid_input, "backprop layer sizes and sample count must be positive");
  std::mt19937_64 rng(seed);
  BackpropData d;
  d.net.input_weights = uniform_tensor(inputs + 1, hidden, 0.0, 0.03, rng);
  d.net.hidden_weights = uniform_tensor(hidden + 1, outputs, 0.0, 0.03, rng);
  d.net.input_prev = HostTensor::Zero(inputs + 1, hidden);
  d.net.hidden_prev = HostTensor::Zero(hidden + 1, outputs);
  for (Index s = 0; s < samples; ++s) {
    d.inputs.push_back(uniform_tensor(1, inputs, 0.0, 1.0, rng));
    d.targets.push_back(uniform_tensor(1, outputs, 0.0, 1.0, rng));
  }
  return d;
}

HostTensor options(Index count, std::uint64_t seed) {
  check_size(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spot(20.0, 120.0), moneyness(0.8, 1.2), rate(0.01, 0.1),
      vol(0.1, 0.6), time(0.25, 2.0);
  std::bernoulli_distribution put(0.5);
  HostTensor o = HostTensor::Zero(count, kOptionColumns);
  for (Index i = 0; i < count; ++i) {
    o(i, option_col::spot) = spot(rng);
    o(i, option_col::strike) = o(i, option_col::spot) * moneyness(rng);
    o(i, option_col::rate) = rate(rng);
    o(i, option_col::volatility) = vol(rng);
    o(i, option_col::time) = time(rng);
    o(i, option_col::type) = put(rng) ? 1.0 : 0.0;
  }
  o.col(kOptionColumns - 1) = oracle_blackscholes(o);
  return o;
}

}  // namespace tpuemu::data
