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

#include "tpuemu/bench/bench.hpp"

#include <algorithm>

#include "tpuemu/core/error.hpp"
#include "tpuemu/device/device.hpp"

namespace tpuemu::bench {
namespace {

QuantizedBlock blank(Index rows, Index cols) {
  QuantizedBlock b;
  b.codes = CodeMatrix::Zero(rows, cols);
  return b;
}

struct Setup {
  Instruction ins;
  std::vector<QuantizedBlock> operands;
};

Setup setup_for(OpKind kind, TensorShape in) {
  if (in.rows < 1 || in.cols < 1) raise(Errc::invalid_input, "input shape must be positive");
  Setup s;
  s.ins.op.kind = kind;
  switch (kind) {
    case OpKind::conv2d:
      s.operands = {blank(in.rows, in.cols), blank(3, 3)};
      s.ins.op.stride = {1, 1};
      break;
    case OpKind::fully_connected:
      s.operands = {blank(1, in.rows), blank(in.rows, in.cols)};
      break;
    case OpKind::crop:
      s.operands = {blank(in.rows, in.cols)};
      s.ins.op.window = {0, 0, std::max<Index>(1, in.rows / 2), std::max<Index>(1, in.cols / 2)};
      break;
    case OpKind::ext:
      s.operands = {blank(in.rows, in.cols)};
      s.ins.op.target = {2 * in.rows, 2 * in.cols};
      break;
    default:
      s.operands.assign(static_cast<std::size_t>(arity(kind)), blank(in.rows, in.cols));
  }
  for (std::size_t i = 0; i < s.operands.size(); ++i) s.ins.operands[i] = i + 1;
  return s;
}

// Clock and result count after one load phase plus `loops` executions.
std::pair<double, std::uint64_t> run_loop(const Setup& s, const DeviceProfile& profile, std::uint64_t loops) {
  Device dev(profile);
  for (std::size_t i = 0; i < s.operands.size(); ++i) dev.load(s.ins.operands[i], s.operands[i]);
  std::uint64_t results = 0;
  for (std::uint64_t i = 0; i < loops; ++i) results += static_cast<std::uint64_t>(dev.account(s.ins).count());
  return {dev.clock_us(), results};
}

}  // namespace

CharacterizationSample measure(OpKind kind, TensorShape input, const DeviceProfile& profile) {
  profile.validate();
  const Setup s = setup_for(kind, input);
  CharacterizationSample out;
  out.kind = kind;
  for (const auto& b : s.operands) out.input_bytes += b.bytes();
  std::tie(out.t1_us, out.r1) = run_loop(s, profile, kShortLoop);
  std::tie(out.t2_us, out.r2) = run_loop(s, profile, kLongLoop);
  return out;
}

Characterization derive(const CharacterizationSample& s) {
  if (!(s.t2_us > s.t1_us) || s.r2 < s.r1) raise(Errc::invalid_input, "sample needs t2 > t1 and r2 >= r1");
  Characterization c;
  c.sample = s;
  const double dt = (s.t2_us - s.t1_us) * 1e-6;
  c.ops = static_cast<double>(kLongLoop - kShortLoop) / dt;
  c.rps = static_cast<double>(s.r2 - s.r1) / dt;
  const double transfer = s.t1_us * 1e-6 - dt;
  if (transfer > 0) c.exchange_rate = static_cast<double>(s.input_bytes) / transfer;
  return c;
}

Characterization characterize(OpKind kind, TensorShape input, const DeviceProfile& profile) {
  return derive(measure(kind, input, profile));
}

}  // namespace tpuemu::bench
