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

#include <vector>

#include "tpuemu/core/tensor.hpp"

namespace tpuemu {

// 3-D thermal stencil coefficients. Defaults follow the Rodinia hotspot3D
// constants for a 16 mm x 16 mm, 0.5 mm thick chip.
struct HotspotCoefficients {
  double cc = 0, cn = 0, cs = 0, ce = 0, cw = 0, ct = 0, cb = 0;
  double step_div_cap = 0;
  double ambient = 80.0;

  static HotspotCoefficients for_grid(Index rows, Index cols, Index layers);
};

using LayerStack = std::vector<HostTensor>;

struct LuFactors {
  HostTensor lower;  // unit diagonal
  HostTensor upper;
};

// Two-layer perceptron with a bias unit prepended to every layer input.
// input_weights is (inputs + 1) x hidden, hidden_weights is (hidden + 1) x outputs.
struct BackpropNet {
  HostTensor input_weights;
  HostTensor hidden_weights;
  HostTensor input_prev;
  HostTensor hidden_prev;
};

struct BackpropConfig {
  double eta = 0.3;
  double momentum = 0.3;
};

// Option rows, one per contract: spot, strike, rate, dividend, volatility,
// years to expiry, type (0 call, 1 put), dividend schedule, reference value.
// Only the first seven columns are read.
inline constexpr Index kOptionColumns = 9;
namespace option_col {
inline constexpr Index spot = 0, strike = 1, rate = 2, volatility = 4, time = 5, type = 6;
}

double sigmoid(double x);
double normal_cdf(double x);

HostTensor column_normalize(const HostTensor& adjacency);

HostTensor oracle_pagerank(const HostTensor& adjacency, int iterations, double damping = 0.85);
LayerStack oracle_hotspot3d(const LayerStack& temperature, const LayerStack& power, int steps,
                            const HotspotCoefficients& c);
LuFactors oracle_lud(const HostTensor& a);
HostTensor oracle_gaussian(const HostTensor& a, const HostTensor& b);
BackpropNet oracle_backprop(const BackpropNet& net, const std::vector<HostTensor>& inputs,
                            const std::vector<HostTensor>& targets, const BackpropConfig& cfg);
HostTensor oracle_blackscholes(const HostTensor& options);

// Helpers shared with the accelerated kernels.
void check_square(const HostTensor& a, const char* what);
HostTensor replicate_pad(const HostTensor& layer);
HostTensor hotspot_kernel(const HotspotCoefficients& c);
double blackscholes_price(double spot, double strike, double rate, double time,
                          bool put, double cdf_d1, double cdf_d2);

}  // namespace tpuemu
