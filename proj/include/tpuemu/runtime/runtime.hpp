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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "tpuemu/runtime/scheduler.hpp"
#include "tpuemu/tensorizer/lower.hpp"

namespace tpuemu {

struct RuntimeConfig {
  std::size_t devices = 1;
  DeviceProfile profile;
  // Saturation or accumulator overflow fails the task instead of being counted.
  bool strict = false;
  LowerMode mode = LowerMode::quantized;

  // Keys: devices, strict, mode, plus every DeviceProfile key.
  bool apply(const std::string& key, const std::string& value);
};

RuntimeConfig load_runtime_config(const std::string& path);

struct Dimension {
  Index rows = 1;
  Index cols = 1;
};

struct BufferRef {
  std::uint64_t id = 0;
  friend auto operator<=>(const BufferRef&, const BufferRef&) = default;
};

enum class TaskState { pending, running, done, failed };
const char* to_string(TaskState s);

struct TaskHandle {
  TaskId task_id = 0;
  TaskState state = TaskState::pending;
};

// Buffers a task reads and writes; used to reject aliasing between
// concurrent tasks.
struct TaskArgs {
  std::vector<BufferRef> inputs;
  std::vector<BufferRef> outputs;
};

using Kernel = std::function<void()>;

struct OpqEntry {
  TaskId task_id = 0;
  Operator op = Operator::add;
  std::vector<BufferRef> inputs;
  BufferRef output;
  QuantFlags flags;
};

struct IqEntry {
  TaskId task_id = 0;
  std::size_t opq_index = 0;
  std::size_t instruction = 0;
  TileCoord coord;
  OpKind kind = OpKind::add;
  std::size_t device = 0;
};

struct RuntimeCounters {
  std::uint64_t saturation_events = 0;
  std::uint64_t overflow_events = 0;
  std::uint64_t input_clamps = 0;
  std::map<std::string, std::uint64_t> instructions_by_kind;
};

class Runtime {
 public:
  explicit Runtime(RuntimeConfig config = {});
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  Dimension alloc_dimension(Index rows, Index cols) const;
  BufferRef create_buffer(Dimension dim, const HostTensor* data = nullptr);
  BufferRef create_buffer(const HostTensor& data);
  HostTensor read_buffer(BufferRef ref) const;
  void write_buffer(BufferRef ref, const HostTensor& data);
  void release_buffer(BufferRef ref);

  TaskHandle enqueue(Kernel kernel, TaskArgs args = {});

  // Must run inside a task. Blocks until the output buffer holds the result.
  void invoke_operator(Operator op, const QuantFlags& flags, std::span<const BufferRef> inputs,
                       BufferRef output, const OpDesc& params = {});

  void sync();
  TaskHandle wait(TaskId task);
  std::string task_error(TaskId task) const;

  const RuntimeConfig& config() const { return config_; }
  double makespan_us() const;
  std::vector<TraceProgram> trace() const;
  std::vector<IqEntry> execution_log() const;
  std::vector<OpqEntry> operation_log() const;
  RuntimeCounters counters() const;
  // Transfer log of one emulated device (block ids in load order).
  std::vector<BlockId> device_transfer_log(std::size_t device) const;
  double device_clock_us(std::size_t device) const;

 private:
  struct Task;
  struct Buffer;
  struct Job;
  struct Worker;

  void worker_loop(Worker& w);
  std::shared_ptr<Buffer> buffer(BufferRef ref) const;
  void finish_task(const std::shared_ptr<Task>& t, TaskState state, std::string error);

  RuntimeConfig config_;

  mutable std::mutex mu_;
  std::condition_variable task_cv_;
  std::map<std::uint64_t, std::shared_ptr<Buffer>> buffers_;
  std::map<TaskId, std::shared_ptr<Task>> tasks_;
  std::uint64_t next_buffer_ = 1;
  TaskId next_task_ = 1;

  mutable std::mutex sched_mu_;
  Scheduler scheduler_;
  std::map<TaskId, double> task_time_;
  std::vector<TraceProgram> trace_;
  std::vector<IqEntry> exec_log_;
  std::vector<OpqEntry> opq_;
  RuntimeCounters counters_;

  std::vector<std::unique_ptr<Worker>> workers_;
};

}  // namespace tpuemu
