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

// new_delta = eta * (in^T delta) + momentum * prev, applied to weights in place.
void adjust(Runtime& rt, const HostTensor& in, const HostTensor& delta, const BackpropConfig& cfg,
            HostTensor& weights, HostTensor& prev) {
  const HostTensor step = detail::run_op(rt, Operator::gemm, in.transpose(), &delta);
  const HostTensor carried = cfg.momentum * prev;
  const HostTensor scaled = cfg.eta * step;
  prev = detail::run_op(rt, Operator::add, scaled, &carried);
  weights += prev;
}

}  // namespace

BackpropNet backprop(Runtime& rt, const BackpropNet& net, const std::vector<HostTensor>& inputs,
                     const std::vector<HostTensor>& targets, const BackpropConfig& cfg) {
  if (inputs.size() != targets.size()) raise(Errc::invalid_input, "inputs and targets differ in count");
  if (net.input_prev.rows() != net.input_weights.rows() || net.input_prev.cols() != net.input_weights.cols() ||
      net.hidden_prev.rows() != net.hidden_weights.rows() || net.hidden_prev.cols() != net.hidden_weights.cols())
    raise(Errc::invalid_input, "momentum buffers must match weight shapes");
  if (net.hidden_weights.rows() != net.input_weights.cols() + 1)
    raise(Errc::invalid_input, "hidden layer width mismatch");

  BackpropNet r = net;
  detail::run_task(rt, [&] {
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const HostTensor x = with_bias(inputs[s]);
      if (x.cols() != r.input_weights.rows()) raise(Errc::invalid_input, "input width mismatch");
      const HostTensor t = targets[s].reshaped(1, targets[s].size());
      if (t.cols() != r.hidden_weights.cols()) raise(Errc::invalid_input, "target width mismatch");

      const HostTensor hidden = squash(detail::run_op(rt, Operator::fully_connected, x, &r.input_weights));
      const HostTensor h = with_bias(hidden);
      const HostTensor out = squash(detail::run_op(rt, Operator::fully_connected, h, &r.hidden_weights));

      const HostTensor delta_o = (out.array() * (1.0 - out.array()) * (t.array() - out.array())).matrix();
      const HostTensor back = delta_o * r.hidden_weights.bottomRows(hidden.cols()).transpose();
      const HostTensor delta_h = (hidden.array() * (1.0 - hidden.array()) * back.array()).matrix();

      adjust(rt, h, delta_o, cfg, r.hidden_weights, r.hidden_prev);
      adjust(rt, x, delta_h, cfg, r.input_weights, r.input_prev);
    }
  });
  return r;
}

}  // namespace tpuemu
