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

#include <chrono>
#include <cmath>

#include "tpuemu/bench/bench.hpp"
#include "tpuemu/core/error.hpp"
#include "tpuemu/kernels/datasets.hpp"
#include "tpuemu/kernels/kernels.hpp"

namespace tpuemu::bench {
namespace {

constexpr int kPagerankIterations = 20;
constexpr int kHotspotSteps = 4;
constexpr Index kHotspotLayers = 4;
constexpr Index kBackpropOutputs = 1;
constexpr Index kBackpropSamples = 4;

// Flattens several results into one column so they share one error report.
HostTensor stack(std::initializer_list<const HostTensor*> parts) {
  Index n = 0;
  for (const HostTensor* p : parts) n += p->size();
  HostTensor out(n, 1);
  Index at = 0;
  for (const HostTensor* p : parts) {
    out.col(0).segment(at, p->size()) = p->reshaped(p->size(), 1);
    at += p->size();
  }
  return out;
}

HostTensor stack_layers(const LayerStack& layers) {
  Index n = 0;
  for (const auto& l : layers) n += l.size();
  HostTensor out(n, 1);
  Index at = 0;
  for (const auto& l : layers) {
    out.col(0).segment(at, l.size()) = l.reshaped(l.size(), 1);
    at += l.size();
  }
  return out;
}

// Prices with the kernel's own CNDF approximation evaluated on the host. In
// oracle-replay mode this is the reference, so only lowering errors remain.
HostTensor polynomial_prices(const HostTensor& opts) {
  HostTensor prices(opts.rows(), 1);
  for (Index i = 0; i < opts.rows(); ++i) {
    const double s = opts(i, option_col::spot), k = opts(i, option_col::strike);
    const double r = opts(i, option_col::rate), v = opts(i, option_col::volatility);
    const double t = opts(i, option_col::time);
    const double d1 = (std::log(s / k) + (r + 0.5 * v * v) * t) / (v * std::sqrt(t));
    const double d2 = d1 - v * std::sqrt(t);
    prices(i, 0) = blackscholes_price(s, k, r, t, opts(i, option_col::type) != 0.0,
                                      tail_polynomial_cdf(d1), tail_polynomial_cdf(d2));
  }
  return prices;
}

struct Outcome {
  HostTensor reference;
  HostTensor result;
  std::vector<Index> dims;
  std::pair<double, double> range;
};

Outcome run_kernel(Runtime& rt, const RunOptions& o, LowerMode mode) {
  const Index n = o.size;
  const std::uint64_t seed = o.seed;
  if (o.app == "gemm") {
    const auto [lo, hi] = o.range.value_or(std::pair{0.0, 128.0});
    const HostTensor a = data::uniform(n, n, lo, hi, seed);
    const HostTensor b = data::uniform(n, n, lo, hi, seed + 1);
    return {a * b, tpu_gemm(rt, a, b), {n, n, n}, {lo, hi}};
  }
  if (o.app == "pagerank") {
    const auto [lo, hi] = o.range.value_or(std::pair{0.0, 1.0});
    const HostTensor g = data::uniform(n, n, lo, hi, seed);
    return {oracle_pagerank(g, kPagerankIterations), pagerank(rt, g, kPagerankIterations), {n, n}, {lo, hi}};
  }
  if (o.app == "hotspot3d") {
    const auto in = data::hotspot(n, n, kHotspotLayers, seed);
    const auto c = HotspotCoefficients::for_grid(n, n, kHotspotLayers);
    return {stack_layers(oracle_hotspot3d(in.temperature, in.power, kHotspotSteps, c)),
            stack_layers(hotspot3d(rt, in.temperature, in.power, kHotspotSteps, c)),
            {n, n, kHotspotLayers, kHotspotSteps},
            {320.0, 340.0}};
  }
  if (o.app == "lud") {
    const HostTensor a = data::exact_lu_matrix(n, seed);
    const LuFactors ref = oracle_lud(a);
    const LuFactors got = lud(rt, a);
    return {stack({&ref.lower, &ref.upper}), stack({&got.lower, &got.upper}), {n, n},
            {a.minCoeff(), a.maxCoeff()}};
  }
  if (o.app == "gaussian") {
    const auto sys = data::exact_linear_system(n, seed);
    return {oracle_gaussian(sys.a, sys.b), gaussian(rt, sys.a, sys.b), {n, n}, {sys.a.minCoeff(), sys.a.maxCoeff()}};
  }
  if (o.app == "backprop") {
    const auto d = data::backprop(n, n, kBackpropOutputs, kBackpropSamples, seed);
    const BackpropNet ref = oracle_backprop(d.net, d.inputs, d.targets, {});
    const BackpropNet got = backprop(rt, d.net, d.inputs, d.targets, {});
    return {stack({&ref.input_weights, &ref.hidden_weights}), stack({&got.input_weights, &got.hidden_weights}),
            {n, n, kBackpropOutputs, kBackpropSamples},
            {0.0, 1.0}};
  }
  if (o.app == "blackscholes") {
    const HostTensor opts = data::options(n, seed);
    HostTensor ref = mode == LowerMode::oracle ? polynomial_prices(opts) : opts.col(kOptionColumns - 1);
    return {std::move(ref), blackscholes(rt, opts), {n, kOptionColumns}, {20.0, 120.0}};
  }
  raise(Errc::invalid_input, "unknown app '" + o.app + "'");
}

}  // namespace

RunReport run_app(const RunOptions& options, const RuntimeConfig& config) {
  if (options.size < 1) raise(Errc::invalid_input, "size must be positive");
  if (config.devices < 1) raise(Errc::invalid_input, "device count must be positive");
  Runtime rt(config);
  const auto start = std::chrono::steady_clock::now();
  const Outcome out = run_kernel(rt, options, config.mode);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  rt.sync();

  RunReport r;
  r.app = options.app;
  r.input.size = options.size;
  r.input.dims = out.dims;
  r.input.range_lo = out.range.first;
  r.input.range_hi = out.range.second;
  r.input.seed = options.seed;
  r.input.devices = config.devices;
  r.input.mode = config.mode == LowerMode::oracle ? "oracle-replay" : "quantized";
  r.error = compare(out.reference, out.result);
  const RuntimeCounters c = rt.counters();
  r.instructions = c.instructions_by_kind;
  r.saturation_events = c.saturation_events;
  r.overflow_events = c.overflow_events;
  r.input_clamps = c.input_clamps;
  const auto trace = rt.trace();
  for (std::size_t d = 1; d <= config.devices; ++d)
    r.makespan_us.push_back(simulate_makespan(trace, d, config.profile));
  if (options.wall_clock) r.wall_seconds = wall.count();
  return r;
}

}  // namespace tpuemu::bench
