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

#include "tpuemu/core/error.hpp"
#include "tpuemu/tensorizer/quantize.hpp"

namespace tpuemu {
namespace {

bool non_negative(const RangeStats& s) { return s.min >= 0.0; }

bool keeps_integers(OpKind kind) {
  return kind != OpKind::mean && kind != OpKind::tanh;
}

bool output_non_negative(OpKind kind, const RangeStats& a, const RangeStats* b) {
  switch (kind) {
    case OpKind::conv2d:
    case OpKind::fully_connected:
    case OpKind::add:
    case OpKind::mul:
      return non_negative(a) && b && non_negative(*b);
    case OpKind::sub:
      return false;
    case OpKind::relu:
      return true;
    default:
      return non_negative(a);
  }
}

// Largest float not above `v`, so codes computed with it never exceed the bound.
float float_toward_zero(double v) {
  float f = static_cast<float>(v);
  if (static_cast<double>(f) > v) f = std::nextafter(f, 0.0f);
  return f;
}

QuantParams params_for_bound(double bound, bool non_neg, bool integral, bool preserve) {
  QuantParams qp;
  if (!(bound > 0.0)) {
    qp.degenerate = true;
    return qp;
  }
  qp.scale = 1.0 / bound;
  double code_scale = non_neg ? 255.0 / bound : 127.5 / bound;
  if (preserve && integral && code_scale >= 1.0) code_scale = std::floor(code_scale);
  qp.code_scale = float_toward_zero(code_scale);
  qp.zero_point = non_neg ? 0 : 128;
  qp.range_min = non_neg ? 0.0 : -bound;
  qp.range_max = bound;
  return qp;
}

}  // namespace

RangeStats declared_stats(const RangeStats& measured,
                          const std::optional<std::pair<double, double>>& override_range) {
  RangeStats s = measured;
  if (override_range) {
    if (!(override_range->first <= override_range->second))
      raise(Errc::invalid_input, "declared range has min > max");
    s.min = override_range->first;
    s.max = override_range->second;
  }
  s.min = std::min(s.min, 0.0);
  s.max = std::max(s.max, 0.0);
  return s;
}

QuantParams input_params(const RangeStats& s, bool preserve_integers) {
  const RangeStats z = declared_stats(s, std::nullopt);
  const double bound = std::max(std::abs(z.min), std::abs(z.max));
  QuantParams qp = params_for_bound(bound, non_negative(z), z.integral, preserve_integers);
  if (!qp.degenerate) qp.scale = 1.0 / z.width();
  return qp;
}

double output_bound(OpKind kind, const RangeStats& a, const RangeStats* b, Index inner_dim) {
  const double ra = declared_stats(a, std::nullopt).width();
  auto rb = [&] {
    if (!b) raise(Errc::invalid_input, std::string(to_string(kind)) + " needs two operand ranges");
    return declared_stats(*b, std::nullopt).width();
  };
  switch (kind) {
    case OpKind::conv2d:
    case OpKind::fully_connected:
      if (inner_dim < 1) raise(Errc::invalid_input, "inner dimension must be >= 1");
      return ra * rb() * static_cast<double>(inner_dim);
    case OpKind::add:
    case OpKind::sub:
      return ra + rb();
    case OpKind::mul:
      return ra * rb();
    default:
      return ra;
  }
}

QuantParams scale_factor(OpKind kind, const RangeStats& a, const RangeStats* b, Index inner_dim,
                         bool preserve_integers) {
  const double bound = output_bound(kind, a, b, inner_dim);
  const bool integral = keeps_integers(kind) && a.integral && (!b || b->integral);
  return params_for_bound(bound, output_non_negative(kind, a, b), integral, preserve_integers);
}

double chain_bound(std::span<const ChainStep> steps, double width) {
  double bound = width;
  for (const ChainStep& s : steps) {
    RangeStats r{0.0, bound, false, false};
    bound = output_bound(s.kind, r, &r, s.inner_dim);
  }
  return bound;
}

}  // namespace tpuemu
