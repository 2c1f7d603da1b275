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

#include <exception>

#include "tpuemu/core/error.hpp"
#include "tpuemu/kernels/kernels.hpp"

namespace tpuemu::detail {

TensorShape result_shape(Operator op, const HostTensor& a, const HostTensor* b, const OpDesc& params);

// One operator through the runtime API: temporary buffers in, result out.
HostTensor run_op(Runtime& rt, Operator op, const HostTensor& a, const HostTensor* b = nullptr,
                  const OpDesc& params = {}, const QuantFlags& flags = {});

// Runs `body` as a task and waits; rethrows whatever the body threw.
template <typename Body>
void run_task(Runtime& rt, Body&& body) {
  std::exception_ptr failure;
  const TaskHandle h = rt.enqueue([&] {
    try {
      body();
    } catch (...) {
      failure = std::current_exception();
      throw;
    }
  });
  rt.wait(h.task_id);
  if (failure) std::rethrow_exception(failure);
}

}  // namespace tpuemu::detail
