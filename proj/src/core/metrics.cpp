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

#include "tpuemu/core/metrics.hpp"

#include <cmath>

#include "tpuemu/core/error.hpp"

namespace tpuemu {
namespace {

void check_same_shape(const HostTensor& a, const HostTensor& b) {
  if (shape_of(a) != shape_of(b)) raise(Errc::invalid_input, "compared tensors differ in shape");
  if (a.size() == 0) raise(Errc::invalid_input, "compared tensors are empty");
}

}  // namespace

double mape(const HostTensor& reference, const HostTensor& approx, double epsilon) {
  check_same_shape(reference, approx);
  const HostTensor denom = reference.cwiseAbs().cwiseMax(epsilon);
  return ((approx - reference).cwiseAbs().array() / denom.array()).mean();
}

double rmse_normalized(const HostTensor& reference, const HostTensor& approx) {
  check_same_shape(reference, approx);
  const double rms = std::sqrt((approx - reference).squaredNorm() / static_cast<double>(reference.size()));
  if (rms == 0.0) return 0.0;
  const double range = reference.maxCoeff() - reference.minCoeff();
  if (range == 0.0) raise(Errc::degenerate_range, "constant reference with nonzero error");
  return rms / range;
}

ErrorReport compare(const HostTensor& reference, const HostTensor& approx, double epsilon) {
  ErrorReport r;
  r.mape = mape(reference, approx, epsilon);
  r.rmse_normalized = rmse_normalized(reference, approx);
  r.max_abs_error = (approx - reference).cwiseAbs().maxCoeff();
  r.count = reference.size();
  return r;
}

}  // namespace tpuemu
