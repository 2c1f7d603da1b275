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

#include "tpuemu/tensorizer/quantize.hpp"

namespace tpuemu {

QuantizedBlock quantize(const HostTensor& t, const QuantParams& qp, std::uint64_t* clamped) {
  QuantizedBlock b;
  b.scale = qp.code_scale;
  b.zero_point = qp.zero_point;
  b.codes.resize(t.rows(), t.cols());
  std::uint64_t count = 0;
  const double scale = qp.code_scale;
  for (Index i = 0; i < t.size(); ++i) {
    bool c = false;
    b.codes.data()[i] = encode_code(t.data()[i], scale, qp.zero_point, &c);
    count += c;
  }
  if (clamped) *clamped += count;
  return b;
}

}  // namespace tpuemu
