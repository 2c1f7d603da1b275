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

#include "tpuemu/core/tensor.hpp"

namespace tpuemu {

inline constexpr double kMapeEpsilon = 1e-9;

struct ErrorReport {
  double mape = 0.0;             // fraction, not percent
  double rmse_normalized = 0.0;  // fraction of the reference's max - min
  double max_abs_error = 0.0;
  Index count = 0;

  friend bool operator==(const ErrorReport&, const ErrorReport&) = default;
};

// Mean of |approx - ref| / max(|ref|, epsilon).
double mape(const HostTensor& reference, const HostTensor& approx, double epsilon = kMapeEpsilon);

// sqrt(mean((approx - ref)^2)) / (ref.max - ref.min).
double rmse_normalized(const HostTensor& reference, const HostTensor& approx);

ErrorReport compare(const HostTensor& reference, const HostTensor& approx,
                    double epsilon = kMapeEpsilon);

}  // namespace tpuemu
