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

#include <cmath>
#include <numbers>
#include <string>

#include "tpuemu/core/apps.hpp"
#include "tpuemu/core/error.hpp"

namespace tpuemu {

HotspotCoefficients HotspotCoefficients::for_grid(Index rows, Index cols, Index layers) {
  constexpr double kMaxPowerDensity = 3.0e6;
  constexpr double kPrecision = 0.001;
  constexpr double kSpecHeatSi = 1.75e6;
  constexpr double kKSi = 100;
  constexpr double kFactorChip = 0.5;
  constexpr double kChipThickness = 0.0005;
  constexpr double kChipHeight = 0.016;
  constexpr double kChipWidth = 0.016;

  const double dx = kChipHeight / static_cast<double>(cols);
  const double dy = kChipWidth / static_cast<double>(rows);
  const double dz = kChipThickness / static_cast<double>(layers);
  const double cap = kFactorChip * kSpecHeatSi * kChipThickness * dx * dy;
  const double rx = dy / (2.0 * kKSi * kChipThickness * dx);
  const double ry = dx / (2.0 * kKSi * kChipThickness * dy);
  const double rz = dz / (kKSi * dx * dy);
  const double max_slope = kMaxPowerDensity / (kFactorChip * kChipThickness * kSpecHeatSi);
  const double dt = kPrecision / max_slope;

  HotspotCoefficients c;
  c.step_div_cap = dt / cap;
  c.ce = c.cw = c.step_div_cap / rx;
  c.cn = c.cs = c.step_div_cap / ry;
  c.ct = c.cb = c.step_div_cap / rz;
  c.cc = 1.0 - (2.0 * c.ce + 2.0 * c.cn + 3.0 * c.ct);
  return c;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void check_square(const HostTensor& a, const char* what) {
  if (a.rows() != a.cols()) raise(Errc::invalid_input, std::string(what) + " must be square");
}

HostTensor column_normalize(const HostTensor& adjacency) {
  check_square(adjacency, "adjacency");
  const Index n = adjacency.rows();
  HostTensor m = adjacency;
  for (Index j = 0; j < n; ++j) {
    const double s = m.col(j).sum();
    if (s > 0)
      m.col(j) /= s;
    else
      m.col(j).setConstant(1.0 / static_cast<double>(n));
  }
  return m;
}

HostTensor oracle_pagerank(const HostTensor& adjacency, int iterations, double damping) {
  const HostTensor m = column_normalize(adjacency);
  const Index n = m.rows();
  HostTensor x = HostTensor::Constant(n, 1, 1.0 / static_cast<double>(n));
  for (int it = 0; it < iterations; ++it) {
    HostTensor next = damping * (m * x);
    next.array() += (1.0 - damping) / static_cast<double>(n);
    x = next / next.sum();
  }
  return x;
}

HostTensor replicate_pad(const HostTensor& layer) {
  const Index r = layer.rows(), c = layer.cols();
  HostTensor p(r + 2, c + 2);
  p.block(1, 1, r, c) = layer;
  p.block(0, 1, 1, c) = layer.row(0);
  p.block(r + 1, 1, 1, c) = layer.row(r - 1);
  p.col(0) = p.col(1);
  p.col(c + 1) = p.col(c);
  return p;
}

HostTensor hotspot_kernel(const HotspotCoefficients& c) {
  HostTensor k = HostTensor::Zero(3, 3);
  k(0, 1) = c.cn;
  k(1, 0) = c.cw;
  k(1, 1) = c.cc;
  k(1, 2) = c.ce;
  k(2, 1) = c.cs;
  return k;
}

LayerStack oracle_hotspot3d(const LayerStack& temperature, const LayerStack& power, int steps,
                            const HotspotCoefficients& c) {
  const auto nz = static_cast<Index>(temperature.size());
  if (nz == 0 || power.size() != temperature.size())
    raise(Errc::invalid_input, "hotspot3d needs matching temperature and power layers");
  const Index ny = temperature[0].rows(), nx = temperature[0].cols();
  LayerStack in = temperature;
  LayerStack out = temperature;
  for (int s = 0; s < steps; ++s) {
    for (Index z = 0; z < nz; ++z) {
      const HostTensor& t = in[z];
      const HostTensor& below = in[z == 0 ? z : z - 1];
      const HostTensor& above = in[z == nz - 1 ? z : z + 1];
      for (Index y = 0; y < ny; ++y) {
        for (Index x = 0; x < nx; ++x) {
          const double w = t(y, x == 0 ? x : x - 1);
          const double e = t(y, x == nx - 1 ? x : x + 1);
          const double n = t(y == 0 ? y : y - 1, x);
          const double so = t(y == ny - 1 ? y : y + 1, x);
          out[z](y, x) = c.cc * t(y, x) + c.cn * n + c.cs * so + c.ce * e + c.cw * w +
                         c.ct * above(y, x) + c.cb * below(y, x) +
                         c.step_div_cap * power[z](y, x) + c.ct * c.ambient;
        }
      }
    }
    std::swap(in, out);
  }
  return in;
}

LuFactors oracle_lud(const HostTensor& a) {
  check_square(a, "lud input");
  const Index n = a.rows();
  HostTensor w = a;
  LuFactors f{HostTensor::Identity(n, n), HostTensor::Zero(n, n)};
  for (Index k = 0; k < n; ++k) {
    if (w(k, k) == 0.0) raise(Errc::singular_matrix, "zero pivot at " + std::to_string(k));
    f.upper.row(k).tail(n - k) = w.row(k).tail(n - k);
    for (Index i = k + 1; i < n; ++i) {
      const double l = w(i, k) / w(k, k);
      f.lower(i, k) = l;
      w.row(i).tail(n - k - 1) -= l * w.row(k).tail(n - k - 1);
    }
  }
  return f;
}

HostTensor oracle_gaussian(const HostTensor& a, const HostTensor& b) {
  check_square(a, "gaussian matrix");
  const Index n = a.rows();
  if (b.size() != n) raise(Errc::invalid_input, "right-hand side length differs from matrix order");
  HostTensor m(n, n + 1);
  m.leftCols(n) = a;
  m.col(n) = b.reshaped(n, 1);
  for (Index k = 0; k < n; ++k) {
    if (m(k, k) == 0.0) raise(Errc::singular_matrix, "zero pivot at " + std::to_string(k));
    for (Index i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      m.row(i).tail(n + 1 - k) -= f * m.row(k).tail(n + 1 - k);
    }
  }
  HostTensor x(n, 1);
  for (Index i = n - 1; i >= 0; --i) {
    double s = m(i, n);
    for (Index j = i + 1; j < n; ++j) s -= m(i, j) * x(j, 0);
    x(i, 0) = s / m(i, i);
  }
  return x;
}

namespace {

HostTensor with_bias(const HostTensor& v) {
  HostTensor r(1, v.size() + 1);
  r(0, 0) = 1.0;
  r.rightCols(v.size()) = v.reshaped(1, v.size());
  return r;
}

HostTensor squash(HostTensor sums) {
  for (Index i = 0; i < sums.size(); ++i) sums.data()[i] = sigmoid(sums.data()[i]);
  return sums;
}

}  // namespace

BackpropNet oracle_backprop(const BackpropNet& net, const std::vector<HostTensor>& inputs,
                            const std::vector<HostTensor>& targets, const BackpropConfig& cfg) {
  if (inputs.size() != targets.size()) raise(Errc::invalid_input, "inputs and targets differ in count");
  BackpropNet r = net;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    const HostTensor x = with_bias(inputs[s]);
    if (x.cols() != r.input_weights.rows()) raise(Errc::invalid_input, "input width mismatch");
    const HostTensor hidden = squash(x * r.input_weights);
    const HostTensor h = with_bias(hidden);
    const HostTensor out = squash(h * r.hidden_weights);
    const HostTensor t = targets[s].reshaped(1, targets[s].size());
    if (t.cols() != out.cols()) raise(Errc::invalid_input, "target width mismatch");

    const HostTensor delta_o =
        (out.array() * (1.0 - out.array()) * (t.array() - out.array())).matrix();
    const HostTensor back = delta_o * r.hidden_weights.bottomRows(hidden.cols()).transpose();
    const HostTensor delta_h = (hidden.array() * (1.0 - hidden.array()) * back.array()).matrix();

    r.hidden_prev = cfg.eta * h.transpose() * delta_o + cfg.momentum * r.hidden_prev;
    r.hidden_weights += r.hidden_prev;
    r.input_prev = cfg.eta * x.transpose() * delta_h + cfg.momentum * r.input_prev;
    r.input_weights += r.input_prev;
  }
  return r;
}

double blackscholes_price(double spot, double strike, double rate, double time,
                          bool put, double cdf_d1, double cdf_d2) {
  const double discounted = strike * std::exp(-rate * time);
  if (put) return discounted * (1.0 - cdf_d2) - spot * (1.0 - cdf_d1);
  return spot * cdf_d1 - discounted * cdf_d2;
}

HostTensor oracle_blackscholes(const HostTensor& options) {
  if (options.cols() != kOptionColumns) raise(Errc::invalid_input, "options need 9 columns");
  HostTensor prices(options.rows(), 1);
  for (Index i = 0; i < options.rows(); ++i) {
    const double s = options(i, option_col::spot), k = options(i, option_col::strike);
    const double r = options(i, option_col::rate), v = options(i, option_col::volatility);
    const double t = options(i, option_col::time);
    const double sqrt_t = std::sqrt(t);
    const double d1 = (std::log(s / k) + (r + 0.5 * v * v) * t) / (v * sqrt_t);
    const double d2 = d1 - v * sqrt_t;
    prices(i, 0) = blackscholes_price(s, k, r, t, options(i, option_col::type) != 0.0,
                                      normal_cdf(d1), normal_cdf(d2));
  }
  return prices;
}

}  // namespace tpuemu
