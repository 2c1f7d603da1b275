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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common.hpp"

namespace tpuemu {
namespace {

constexpr int kDegree = static_cast<int>(kTailCoefficients.size()) - 1;

double density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double tail_argument(double x) { return 1.0 / (1.0 + kTailT * std::min(std::abs(x), kTailMaxArgument)); }

// Bernstein basis of degree kDegree at t.
std::array<double, kTailCoefficients.size()> basis(double t) {
  std::array<double, kTailCoefficients.size()> b{};
  double binom = 1.0;
  for (int j = 0; j <= kDegree; ++j) {
    b[j] = binom * std::pow(t, j) * std::pow(1.0 - t, kDegree - j);
    binom = binom * (kDegree - j) / (j + 1);
  }
  return b;
}

double from_tail(double x, double tail_poly) {
  const double upper = density(std::min(std::abs(x), kTailMaxArgument)) * tail_poly;
  return x >= 0 ? 1.0 - upper : upper;
}

}  // namespace

double tail_polynomial_cdf(double x) {
  const auto b = basis(tail_argument(x));
  const double p = std::inner_product(b.begin(), b.end(), kTailCoefficients.begin(), 0.0);
  return from_tail(x, p);
}

HostTensor blackscholes(Runtime& rt, const HostTensor& options) {
  if (options.cols() != kOptionColumns) raise(Errc::invalid_input, "options need 9 columns");
  check_finite(options, "options");
  const Index n = options.rows();
  if (n == 0) raise(Errc::invalid_input, "no options to price");
  std::vector<double> d(2 * n);
  for (Index i = 0; i < n; ++i) {
    const double s = options(i, option_col::spot), k = options(i, option_col::strike);
    const double v = options(i, option_col::volatility), t = options(i, option_col::time);
    if (s <= 0 || k <= 0 || v <= 0 || t <= 0)
      raise(Errc::invalid_input, "spot, strike, volatility and time must be positive");
    const double sqrt_t = std::sqrt(t);
    d[2 * i] = (std::log(s / k) + (options(i, option_col::rate) + 0.5 * v * v) * t) / (v * sqrt_t);
    d[2 * i + 1] = d[2 * i] - v * sqrt_t;
  }

  // Columns sorted by t so each device tile spans a narrow band of the basis.
  std::vector<Index> order(d.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> targ(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) targ[i] = tail_argument(d[i]);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return targ[a] < targ[b]; });

  HostTensor basis_matrix(kDegree + 1, static_cast<Index>(d.size()));
  for (Index c = 0; c < basis_matrix.cols(); ++c) {
    const auto b = basis(targ[order[c]]);
    for (int j = 0; j <= kDegree; ++j) basis_matrix(j, c) = b[j];
  }
  HostTensor coef(1, kDegree + 1);
  for (int j = 0; j <= kDegree; ++j) coef(0, j) = kTailCoefficients[j];

  QuantFlags flags;
  flags.inner_tile = 1;
  HostTensor poly;
  detail::run_task(rt, [&] { poly = detail::run_op(rt, Operator::fully_connected, coef, &basis_matrix, {}, flags); });

  std::vector<double> cdf(d.size());
  for (Index c = 0; c < poly.cols(); ++c) cdf[order[c]] = from_tail(d[order[c]], poly(0, c));

  HostTensor prices(n, 1);
  for (Index i = 0; i < n; ++i)
    prices(i, 0) = blackscholes_price(options(i, option_col::spot), options(i, option_col::strike),
                                      options(i, option_col::rate), options(i, option_col::time),
                                      options(i, option_col::type) != 0.0, cdf[2 * i], cdf[2 * i + 1]);
  return prices;
}

}  // namespace tpuemu
