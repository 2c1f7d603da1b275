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

#include "common.hpp"

namespace tpuemu {

LayerStack hotspot3d(Runtime& rt, const LayerStack& temperature, const LayerStack& power, int steps,
                     const HotspotCoefficients& c) {
  const auto layers = static_cast<Index>(temperature.size());
  if (layers == 0 || power.size() != temperature.size())
    raise(Errc::invalid_input, "hotspot3d needs matching temperature and power layers");
  const Index rows = temperature[0].rows(), cols = temperature[0].cols();
  if (rows < 3 || cols < 3) raise(Errc::invalid_input, "hotspot3d grid must be at least 3x3");
  for (Index z = 0; z < layers; ++z) {
    if (shape_of(temperature[z]) != TensorShape{rows, cols} || shape_of(power[z]) != TensorShape{rows, cols})
      raise(Errc::invalid_input, "all layers must share one shape");
    check_finite(temperature[z], "temperature");
    check_finite(power[z], "power");
  }
  if (steps < 0) raise(Errc::invalid_input, "steps must be >= 0");

  const HostTensor kernel = hotspot_kernel(c);
  const double kernel_sum = kernel.sum();
  LayerStack in = temperature;
  LayerStack out = temperature;
  detail::run_task(rt, [&] {
    for (int s = 0; s < steps; ++s) {
      for (Index z = 0; z < layers; ++z) {
        // The in-plane stencil runs on the device over deviations from the
        // layer mean; the offset comes back exactly by linearity.
        const double offset = in[z].mean();
        HostTensor padded = replicate_pad(in[z]);
        padded.array() -= offset;
        const HostTensor conv = detail::run_op(rt, Operator::conv2d, padded, &kernel);
        const HostTensor& below = in[z == 0 ? z : z - 1];
        const HostTensor& above = in[z == layers - 1 ? z : z + 1];
        out[z] = conv.topLeftCorner(rows, cols);
        out[z].array() += offset * kernel_sum + c.ct * c.ambient;
        out[z] += c.ct * above + c.cb * below + c.step_div_cap * power[z];
      }
      std::swap(in, out);
    }
  });
  return in;
}

}  // namespace tpuemu
