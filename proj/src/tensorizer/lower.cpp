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

#include "tpuemu/tensorizer/lower.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "tpuemu/core/error.hpp"
#include "tpuemu/kernels/gemm_plan.hpp"

namespace tpuemu {
namespace {

Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

// rows x cols window of `t` at (r0, c0); cells outside `t` read as `fill`.
HostTensor tile_of(const HostTensor& t, Index r0, Index c0, Index rows, Index cols,
                   double fill = 0.0) {
  HostTensor out = HostTensor::Constant(rows, cols, fill);
  const Index r = std::min(rows, t.rows() - r0);
  const Index c = std::min(cols, t.cols() - c0);
  if (r > 0 && c > 0) out.topLeftCorner(r, c) = t.block(r0, c0, r, c);
  return out;
}

class Builder {
 public:
  Builder(const Request& req, const DeviceProfile& profile, LowerMode mode)
      : req_(req), profile_(profile), mode_(mode) {
    prog_.op = req.op;
    prog_.flags = req.flags;
  }

  // Adds an operand tile; `which` selects the declared-range override.
  std::size_t operand(HostTensor real, int which) {
    OperandTile t;
    t.id = next_block_id();
    const auto& over = which == 0 ? req_.flags.range_a : req_.flags.range_b;
    RangeStats s = range_stats(real, default_sample_fraction(real.size()));
    if (over) s = declared_stats(s, over);
    stats_.push_back(s);
    if (mode_ == LowerMode::quantized) {
      t.params = input_params(s, req_.flags.preserve_integers);
      t.block = quantize(real, t.params, &prog_.input_clamps);
    }
    t.real = std::move(real);
    prog_.operands.push_back(std::move(t));
    return prog_.operands.size() - 1;
  }

  ProgramInstruction& instruction(const OpDesc& op, std::size_t a, std::optional<std::size_t> b,
                                  Index inner_dim, TileCoord coord) {
    ProgramInstruction p;
    p.ins.op = op;
    p.operand_index = {a, b.value_or(a)};
    p.ins.operands = {prog_.operands[a].id, prog_.operands[b.value_or(a)].id};
    p.coord = coord;

    std::size_t bytes = static_cast<std::size_t>(prog_.operands[a].real.size());
    if (b && *b != a) bytes += static_cast<std::size_t>(prog_.operands[*b].real.size());
    if (bytes > profile_.onchip_memory_bytes)
      raise(Errc::planning_error, std::string(to_string(op.kind)) + " operands need " +
                                      std::to_string(bytes) + " bytes of device memory");

    if (mode_ == LowerMode::quantized) {
      if (is_reshape(op.kind)) {
        p.ins.out_scale = prog_.operands[a].params.code_scale;
        p.ins.out_zero_point = prog_.operands[a].params.zero_point;
      } else {
        const RangeStats* sb = b ? &stats_[*b] : nullptr;
        const QuantParams q =
            scale_factor(op.kind, stats_[a], sb, inner_dim, req_.flags.preserve_integers);
        p.ins.out_scale = q.code_scale;
        p.ins.out_zero_point = q.zero_point;
      }
    }
    prog_.instructions.push_back(std::move(p));
    return prog_.instructions.back();
  }

  InstructionProgram finish(Aggregation agg, TensorShape out, std::size_t expected) {
    prog_.aggregation = agg;
    prog_.output_shape = out;
    prog_.expected_instructions = expected;
    return std::move(prog_);
  }

  InstructionProgram& program() { return prog_; }

 private:
  const Request& req_;
  const DeviceProfile& profile_;
  LowerMode mode_;
  InstructionProgram prog_;
  std::vector<RangeStats> stats_;
};

const HostTensor& input(const Request& r, int i) {
  const HostTensor* t = r.inputs[static_cast<std::size_t>(i)];
  if (!t) raise(Errc::invalid_input, std::string(to_string(r.op)) + ": missing input " + std::to_string(i));
  if (t->size() == 0) raise(Errc::invalid_input, "empty input tensor");
  return *t;
}

InstructionProgram lower_elementwise(const Request& r, const DeviceProfile& prof, LowerMode mode) {
  const OpKind kind = device_kind(r.op);
  const HostTensor& a = input(r, 0);
  const HostTensor* b = is_pairwise(kind) ? &input(r, 1) : nullptr;
  if (b && shape_of(*b) != shape_of(a)) raise(Errc::invalid_shape, "pairwise operands differ in shape");

  const Index tr = std::min(prof.arithmetic_tile, a.rows());
  const Index tc = std::min(prof.arithmetic_tile, a.cols());
  const Index gr = ceil_div(a.rows(), tr), gc = ceil_div(a.cols(), tc);
  Builder bld(r, prof, mode);
  OpDesc op;
  op.kind = kind;
  for (Index i = 0; i < gr; ++i) {
    for (Index j = 0; j < gc; ++j) {
      const std::size_t ta = bld.operand(tile_of(a, i * tr, j * tc, tr, tc), 0);
      std::optional<std::size_t> tb;
      if (b) tb = bld.operand(tile_of(*b, i * tr, j * tc, tr, tc), 1);
      auto& p = bld.instruction(op, ta, tb, 1, {i, j, 0});
      p.placements.push_back({0, 0, i * tr, j * tc, std::min(tr, a.rows() - i * tr),
                              std::min(tc, a.cols() - j * tc), 1.0});
    }
  }
  return bld.finish(Aggregation::none, shape_of(a), static_cast<std::size_t>(gr * gc));
}

InstructionProgram lower_reduce(const Request& r, const DeviceProfile& prof, LowerMode mode) {
  const OpKind kind = device_kind(r.op);
  const HostTensor& a = input(r, 0);
  const Index tr = std::min(prof.reduce_tile, a.rows());
  const Index tc = std::min(prof.reduce_tile, a.cols());
  const Index gr = ceil_div(a.rows(), tr), gc = ceil_div(a.cols(), tc);
  Builder bld(r, prof, mode);
  OpDesc op;
  op.kind = kind;
  for (Index i = 0; i < gr; ++i) {
    for (Index j = 0; j < gc; ++j) {
      // Zero padding leaves sums intact; max tiles repeat an in-tile value instead.
      const double fill = kind == OpKind::max ? a(i * tr, j * tc) : 0.0;
      const std::size_t ta = bld.operand(tile_of(a, i * tr, j * tc, tr, tc, fill), 0);
      auto& p = bld.instruction(op, ta, std::nullopt, 1, {i, j, 0});
      p.placements.push_back({0, 0, 0, 0, 1, 1, static_cast<double>(tr * tc)});
    }
  }
  bld.program().reduce_denominator = static_cast<double>(a.size());
  return bld.finish(Aggregation::reduce_partials, {1, 1}, static_cast<std::size_t>(gr * gc));
}

InstructionProgram lower_fully_connected(const Request& r, const DeviceProfile& prof,
                                         LowerMode mode) {
  const HostTensor& v = input(r, 0);
  const HostTensor& w = input(r, 1);
  if (v.cols() != w.rows()) raise(Errc::invalid_shape, "fully_connected inner dimension mismatch");
  const Index n = w.rows(), k = w.cols();
  const Index ti = std::min(r.flags.inner_tile.value_or(prof.arithmetic_tile), n);
  if (ti < 1) raise(Errc::invalid_input, "inner tile must be >= 1");
  const Index tc = std::min(prof.arithmetic_tile, k);
  const Index gi = ceil_div(n, ti), gc = ceil_div(k, tc);

  Builder bld(r, prof, mode);
  std::vector<std::size_t> models(static_cast<std::size_t>(gi * gc));
  for (Index p = 0; p < gi; ++p)
    for (Index q = 0; q < gc; ++q)
      models[static_cast<std::size_t>(p * gc + q)] = bld.operand(tile_of(w, p * ti, q * tc, ti, tc), 1);

  OpDesc op;
  op.kind = OpKind::fully_connected;
  for (Index row = 0; row < v.rows(); ++row) {
    for (Index p = 0; p < gi; ++p) {
      const std::size_t vec = bld.operand(tile_of(v, row, p * ti, 1, ti), 0);
      const Index inner = std::min(ti, n - p * ti);
      for (Index q = 0; q < gc; ++q) {
        auto& ins = bld.instruction(op, vec, models[static_cast<std::size_t>(p * gc + q)], inner,
                                    {row, q, p});
        ins.placements.push_back({0, 0, row, q * tc, 1, std::min(tc, k - q * tc), 1.0});
      }
    }
  }
  return bld.finish(Aggregation::sum_partials, {v.rows(), k},
                    static_cast<std::size_t>(v.rows() * gi * gc));
}

InstructionProgram lower_gemm(const Request& r, const DeviceProfile& prof, LowerMode mode) {
  const HostTensor& a = input(r, 0);
  const HostTensor& b = input(r, 1);
  if (a.cols() != b.rows()) raise(Errc::invalid_shape, "gemm inner dimension mismatch");
  const Index m = a.rows(), n = a.cols(), k = b.cols();
  const Index tm = std::min(prof.gemm_tile, m);
  const Index ti = std::min(r.flags.inner_tile.value_or(prof.gemm_tile), n);
  if (ti < 1) raise(Errc::invalid_input, "inner tile must be >= 1");
  const Index tk = std::min(prof.gemm_tile, k);
  const Index gm = ceil_div(m, tm), gi = ceil_div(n, ti), gk = ceil_div(k, tk);
  const GemmPlan plan = GemmPlan::make(tm, ti, tk);

  Builder bld(r, prof, mode);
  std::vector<std::size_t> kernels(static_cast<std::size_t>(gi * gk));
  for (Index p = 0; p < gi; ++p)
    for (Index q = 0; q < gk; ++q)
      kernels[static_cast<std::size_t>(p * gk + q)] =
          bld.operand(plan.kernel_set(tile_of(b, p * ti, q * tk, ti, tk)), 1);

  for (Index i = 0; i < gm; ++i) {
    for (Index p = 0; p < gi; ++p) {
      const std::size_t stacked = bld.operand(plan.stack_rows(tile_of(a, i * tm, p * ti, tm, ti)), 0);
      const Index inner = std::min(ti, n - p * ti);
      for (Index q = 0; q < gk; ++q) {
        auto& ins = bld.instruction(plan.conv_op(), stacked,
                                    kernels[static_cast<std::size_t>(p * gk + q)], inner, {i, q, p});
        ins.placements.push_back(
            {0, 0, i * tm, q * tk, std::min(tm, m - i * tm), std::min(tk, k - q * tk), 1.0});
      }
    }
  }
  return bld.finish(Aggregation::sum_partials, {m, k}, static_cast<std::size_t>(gm * gi * gk));
}

InstructionProgram lower_conv2d(const Request& r, const DeviceProfile& prof, LowerMode mode) {
  const HostTensor& x = input(r, 0);
  const HostTensor& kset = input(r, 1);
  OpDesc op = r.params;
  op.kind = OpKind::conv2d;
  const TensorShape shapes[2] = {shape_of(x), shape_of(kset)};
  const TensorShape full = output_shape(op, shapes);
  const Index sx = op.stride.rows, sy = op.stride.cols;
  const Index lr = kset.rows() / op.kernel_count, lc = kset.cols();
  const Index out_r = full.rows, out_c = full.cols / op.kernel_count;
  const Index tr = std::min(prof.arithmetic_tile, out_r);
  const Index tc = std::min(prof.arithmetic_tile, out_c);
  const Index gr = ceil_div(out_r, tr), gc = ceil_div(out_c, tc);
  const Index in_rows = (tr - 1) * sx + lr;
  const Index in_cols = (tc - 1) * sy + lc;
  const Index tile_out_c = ceil_div(in_cols, sy);

  Builder bld(r, prof, mode);
  const std::size_t kern = bld.operand(kset, 1);
  for (Index i = 0; i < gr; ++i) {
    for (Index j = 0; j < gc; ++j) {
      const std::size_t in = bld.operand(tile_of(x, i * tr * sx, j * tc * sy, in_rows, in_cols), 0);
      auto& ins = bld.instruction(op, in, kern, lr * lc, {i, j, 0});
      const Index rows = std::min(tr, out_r - i * tr);
      const Index cols = std::min(tc, out_c - j * tc);
      for (Index kk = 0; kk < op.kernel_count; ++kk)
        ins.placements.push_back({0, kk * tile_out_c, i * tr, kk * out_c + j * tc, rows, cols, 1.0});
    }
  }
  return bld.finish(Aggregation::none, full, static_cast<std::size_t>(gr * gc));
}

InstructionProgram lower_reshape(const Request& r, const DeviceProfile& prof, LowerMode mode) {
  const HostTensor& a = input(r, 0);
  OpDesc op = r.params;
  op.kind = device_kind(r.op);
  const TensorShape in = shape_of(a);
  const TensorShape out = output_shape(op, std::span<const TensorShape>(&in, 1));
  Builder bld(r, prof, mode);
  const std::size_t ta = bld.operand(a, 0);
  auto& ins = bld.instruction(op, ta, std::nullopt, 1, {0, 0, 0});
  ins.placements.push_back({0, 0, 0, 0, out.rows, out.cols, 1.0});
  return bld.finish(Aggregation::none, out, 1);
}

}  // namespace

const char* to_string(Operator op) {
  switch (op) {
    case Operator::gemm: return "gemm";
    default: return to_string(device_kind(op));
  }
}

OpKind device_kind(Operator op) {
  switch (op) {
    case Operator::add: return OpKind::add;
    case Operator::sub: return OpKind::sub;
    case Operator::mul: return OpKind::mul;
    case Operator::tanh: return OpKind::tanh;
    case Operator::relu: return OpKind::relu;
    case Operator::mean: return OpKind::mean;
    case Operator::max: return OpKind::max;
    case Operator::crop: return OpKind::crop;
    case Operator::ext: return OpKind::ext;
    case Operator::fully_connected: return OpKind::fully_connected;
    case Operator::conv2d: return OpKind::conv2d;
    case Operator::gemm: return OpKind::conv2d;
  }
  raise(Errc::unsupported_operation, "unknown operator");
}

BlockId next_block_id() {
  static std::atomic<BlockId> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

InstructionProgram lower(const Request& r, const DeviceProfile& profile, LowerMode mode) {
  profile.validate();
  switch (r.op) {
    case Operator::add:
    case Operator::sub:
    case Operator::mul:
    case Operator::tanh:
    case Operator::relu:
      return lower_elementwise(r, profile, mode);
    case Operator::mean:
    case Operator::max:
      return lower_reduce(r, profile, mode);
    case Operator::fully_connected:
      return lower_fully_connected(r, profile, mode);
    case Operator::gemm:
      return lower_gemm(r, profile, mode);
    case Operator::conv2d:
      return lower_conv2d(r, profile, mode);
    case Operator::crop:
    case Operator::ext:
      return lower_reshape(r, profile, mode);
  }
  raise(Errc::unsupported_operation, "unknown operator");
}

HostTensor assemble(const InstructionProgram& prog, std::span<const HostTensor> outputs) {
  if (outputs.size() != prog.instructions.size())
    raise(Errc::invalid_input, "output count differs from instruction count");
  if (prog.aggregation == Aggregation::reduce_partials) {
    const bool is_max = prog.op == Operator::max;
    double acc = is_max ? outputs[0](0, 0) : 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const double v = outputs[i](0, 0);
      acc = is_max ? std::max(acc, v) : acc + v * prog.instructions[i].placements[0].weight;
    }
    return HostTensor::Constant(1, 1, is_max ? acc : acc / prog.reduce_denominator);
  }
  HostTensor out = HostTensor::Zero(prog.output_shape.rows, prog.output_shape.cols);
  for (std::size_t i = 0; i < outputs.size(); ++i)
    for (const Placement& p : prog.instructions[i].placements)
      out.block(p.dst_row, p.dst_col, p.rows, p.cols) +=
          outputs[i].block(p.src_row, p.src_col, p.rows, p.cols);
  return out;
}

HostTensor replay_with_oracle(const InstructionProgram& prog) {
  std::vector<HostTensor> outs;
  outs.reserve(prog.instructions.size());
  for (const ProgramInstruction& p : prog.instructions) {
    std::vector<HostTensor> in;
    for (int i = 0; i < p.ins.operand_count(); ++i) in.push_back(prog.operand(p, i).real);
    outs.push_back(oracle_execute(p.ins.op, in));
  }
  return assemble(prog, outs);
}

HostTensor oracle_request(const Request& r) {
  const HostTensor& a = input(r, 0);
  if (r.op == Operator::gemm) return oracle_gemm(a, input(r, 1));
  OpDesc op = r.params;
  op.kind = device_kind(r.op);
  if (arity(op.kind) == 1) return oracle_execute(op, std::span<const HostTensor>(&a, 1));
  const HostTensor both[2] = {a, input(r, 1)};
  return oracle_execute(op, both);
}

HostTensor execute_program(const InstructionProgram& prog, Device& device) {
  std::vector<HostTensor> outs;
  outs.reserve(prog.instructions.size());
  std::vector<BlockId> loaded;
  for (const ProgramInstruction& p : prog.instructions) {
    for (int i = 0; i < p.ins.operand_count(); ++i) {
      const OperandTile& t = prog.operand(p, i);
      if (device.resident(t.id)) continue;
      try {
        device.load(t.id, t.block);
      } catch (const Error& e) {
        if (e.code() != Errc::device_memory_full) throw;
        for (BlockId id : loaded)
          if (id != p.ins.operands[0] && id != p.ins.operands[1]) device.evict(id);
        device.load(t.id, t.block);
      }
      loaded.push_back(t.id);
    }
    outs.push_back(dequantize(device.execute(p.ins)));
  }
  for (BlockId id : loaded) device.evict(id);
  return assemble(prog, outs);
}

}  // namespace tpuemu
