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

#include <array>
#include <vector>

#include "tpuemu/core/apps.hpp"
#include "tpuemu/runtime/runtime.hpp"

namespace tpuemu {

// Each kernel runs as one runtime task and blocks until it finishes. A failed
// task rethrows its error.

HostTensor tpu_gemm(Runtime& rt, const HostTensor& a, const HostTensor& b,
                    const QuantFlags& flags = {});

// Column vector of ranks. Column j of `adjacency` lists the links leaving node j.
HostTensor pagerank(Runtime& rt, const HostTensor& adjacency, int iterations,
                    double damping = 0.85);

LayerStack hotspot3d(Runtime& rt, const LayerStack& temperature, const LayerStack& power,
                     int steps, const HotspotCoefficients& c);

LuFactors lud(Runtime& rt, const HostTensor& a);

// Solution as an n x 1 column.
HostTensor gaussian(Runtime& rt, const HostTensor& a, const HostTensor& b);

BackpropNet backprop(Runtime& rt, const BackpropNet& net, const std::vector<HostTensor>& inputs,
                     const std::vector<HostTensor>& targets, const BackpropConfig& cfg = {});

// Prices as an n x 1 column.
HostTensor blackscholes(Runtime& rt, const HostTensor& options);

// Generated by tools/fit_cndf.py. Bernstein coefficients of the tail
// polynomial P(t) with 1 - Phi(x) = phi(x) * P(1 / (1 + kTailT * x)), x >= 0.
inline constexpr double kTailT = 0.2316419;
inline constexpr double kTailMaxArgument = 12.0;
inline constexpr std::array<double, 10> kTailCoefficients = {
    -0.00031318553790188238, 0.026082731813764692, 0.057556104535722803,
    0.099465696724104158,    0.15324423034730048,  0.22832240072248128,
    0.33520843190492355,     0.49846915473981573,  0.77364683646607346,
    1.2533141187176249,
};

// Host evaluation of the same approximation, for checking the fit.
double tail_polynomial_cdf(double x);

}  // namespace tpuemu
