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

#include "tpuemu/runtime/runtime.hpp"

#include <algorithm>
#include <sstream>

#include "tpuemu/core/error.hpp"

namespace tpuemu {

struct Runtime::Buffer {
  Dimension dim;
  HostTensor data;
};

struct Runtime::Task {
  TaskId id = 0;
  TaskState state = TaskState::pending;
  TaskArgs args;
  std::string error;
  std::jthread thread;
};

namespace {

struct Batch {
  std::mutex mu;
  std::condition_variable cv;
  std::size_t pending = 0;
  std::string error;
  std::vector<HostTensor> outputs;
  std::uint64_t saturation = 0;
  std::uint64_t overflow = 0;
};

struct CurrentTask {
  const void* runtime = nullptr;
  TaskId id = 0;
};
thread_local CurrentTask current_task;

std::string flags_key(const QuantFlags& f) {
  std::ostringstream s;
  s.precision(17);
  s << f.preserve_integers << '|';
  if (f.range_a) s << f.range_a->first << ',' << f.range_a->second;
  s << '|';
  if (f.range_b) s << f.range_b->first << ',' << f.range_b->second;
  s << '|' << f.inner_tile.value_or(0);
  return s.str();
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  raise(Errc::invalid_input, "config key " + key + " expects a boolean, got '" + v + "'");
}

}  // namespace

struct Runtime::Job {
  const InstructionProgram* program = nullptr;
  std::size_t index = 0;
  Slot slot;
  Batch* batch = nullptr;
};

struct Runtime::Worker {
  explicit Worker(const DeviceProfile& p) : device(p) {}
  Device device;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Job> queue;
  bool stop = false;
  std::jthread thread;
};

bool RuntimeConfig::apply(const std::string& key, const std::string& value) {
  if (key == "devices") {
    long n = 0;
    try {
      n = std::stol(value);
    } catch (const std::exception&) {
      raise(Errc::invalid_input, "devices must be an integer");
    }
    if (n < 1) raise(Errc::invalid_input, "devices must be >= 1");
    devices = static_cast<std::size_t>(n);
  } else if (key == "strict") {
    strict = parse_bool(key, value);
  } else if (key == "mode") {
    if (value == "quantized")
      mode = LowerMode::quantized;
    else if (value == "oracle-replay")
      mode = LowerMode::oracle;
    else
      raise(Errc::invalid_input, "mode must be quantized or oracle-replay");
  } else {
    return profile.apply(key, value);
  }
  return true;
}

RuntimeConfig load_runtime_config(const std::string& path) {
  RuntimeConfig c;
  for (const auto& [key, value] : read_key_values(path))
    if (!c.apply(key, value)) raise(Errc::invalid_input, "unknown config key " + key);
  c.profile.validate();
  return c;
}

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::pending: return "pending";
    case TaskState::running: return "running";
    case TaskState::done: return "done";
    case TaskState::failed: return "failed";
  }
  return "unknown";
}

Runtime::Runtime(RuntimeConfig config)
    : config_(std::move(config)), scheduler_(config_.devices, config_.profile) {
  config_.profile.validate();
  for (std::size_t d = 0; d < config_.devices; ++d) {
    auto w = std::make_unique<Worker>(config_.profile);
    Worker* raw = w.get();
    w->thread = std::jthread([this, raw] { worker_loop(*raw); });
    workers_.push_back(std::move(w));
  }
}

Runtime::~Runtime() {
  sync();
  {
    std::lock_guard lk(mu_);
    for (auto& [id, t] : tasks_)
      if (t->thread.joinable()) t->thread.join();
  }
  for (auto& w : workers_) {
    {
      std::lock_guard lk(w->mu);
      w->stop = true;
    }
    w->cv.notify_all();
  }
  workers_.clear();
}

Dimension Runtime::alloc_dimension(Index rows, Index cols) const {
  if (rows < 1 || cols < 1) raise(Errc::invalid_input, "dimensions must be >= 1");
  return {rows, cols};
}

BufferRef Runtime::create_buffer(Dimension dim, const HostTensor* data) {
  if (dim.rows < 1 || dim.cols < 1) raise(Errc::invalid_input, "dimensions must be >= 1");
  auto b = std::make_shared<Buffer>();
  b->dim = dim;
  if (data) {
    if (data->rows() != dim.rows || data->cols() != dim.cols)
      raise(Errc::invalid_input, "buffer data does not match its dimension");
    check_finite(*data, "buffer data");
    b->data = *data;
  } else {
    b->data = HostTensor::Zero(dim.rows, dim.cols);
  }
  std::lock_guard lk(mu_);
  const BufferRef ref{next_buffer_++};
  buffers_.emplace(ref.id, std::move(b));
  return ref;
}

BufferRef Runtime::create_buffer(const HostTensor& data) {
  return create_buffer(Dimension{data.rows(), data.cols()}, &data);
}

std::shared_ptr<Runtime::Buffer> Runtime::buffer(BufferRef ref) const {
  std::lock_guard lk(mu_);
  auto it = buffers_.find(ref.id);
  if (it == buffers_.end()) raise(Errc::invalid_input, "unknown buffer " + std::to_string(ref.id));
  return it->second;
}

HostTensor Runtime::read_buffer(BufferRef ref) const {
  auto b = buffer(ref);
  std::lock_guard lk(mu_);
  return b->data;
}

void Runtime::write_buffer(BufferRef ref, const HostTensor& data) {
  auto b = buffer(ref);
  if (data.rows() != b->dim.rows || data.cols() != b->dim.cols)
    raise(Errc::invalid_input, "data does not match the buffer dimension");
  std::lock_guard lk(mu_);
  b->data = data;
}

void Runtime::release_buffer(BufferRef ref) {
  std::lock_guard lk(mu_);
  buffers_.erase(ref.id);
}

TaskHandle Runtime::enqueue(Kernel kernel, TaskArgs args) {
  if (!kernel) raise(Errc::invalid_input, "empty kernel");
  std::lock_guard lk(mu_);
  for (const auto& [id, t] : tasks_) {
    if (t->state == TaskState::done || t->state == TaskState::failed) continue;
    for (BufferRef in : args.inputs)
      if (std::find(t->args.outputs.begin(), t->args.outputs.end(), in) != t->args.outputs.end())
        raise(Errc::usage_error, "input buffer " + std::to_string(in.id) +
                                     " is a pending output of task " + std::to_string(id));
  }
  auto task = std::make_shared<Task>();
  task->id = next_task_++;
  task->args = std::move(args);
  tasks_.emplace(task->id, task);
  task->thread = std::jthread([this, task, kernel = std::move(kernel)] {
    {
      std::lock_guard g(mu_);
      task->state = TaskState::running;
    }
    current_task = {this, task->id};
    try {
      kernel();
      finish_task(task, TaskState::done, {});
    } catch (const std::exception& e) {
      finish_task(task, TaskState::failed, e.what());
    } catch (...) {
      finish_task(task, TaskState::failed, "non-standard exception");
    }
    current_task = {};
  });
  return {task->id, TaskState::pending};
}

void Runtime::finish_task(const std::shared_ptr<Task>& t, TaskState state, std::string error) {
  {
    std::lock_guard s(sched_mu_);
    scheduler_.forget_affinity(t->id);
  }
  {
    std::lock_guard lk(mu_);
    t->state = state;
    t->error = std::move(error);
  }
  task_cv_.notify_all();
}

void Runtime::sync() {
  std::unique_lock lk(mu_);
  task_cv_.wait(lk, [this] {
    return std::all_of(tasks_.begin(), tasks_.end(), [](const auto& kv) {
      return kv.second->state == TaskState::done || kv.second->state == TaskState::failed;
    });
  });
}

TaskHandle Runtime::wait(TaskId id) {
  std::unique_lock lk(mu_);
  auto it = tasks_.find(id);
  if (it == tasks_.end()) raise(Errc::invalid_input, "unknown task " + std::to_string(id));
  auto t = it->second;
  task_cv_.wait(lk, [&] { return t->state == TaskState::done || t->state == TaskState::failed; });
  return {id, t->state};
}

std::string Runtime::task_error(TaskId id) const {
  std::lock_guard lk(mu_);
  auto it = tasks_.find(id);
  if (it == tasks_.end()) raise(Errc::invalid_input, "unknown task " + std::to_string(id));
  return it->second->error;
}

void Runtime::invoke_operator(Operator op, const QuantFlags& flags,
                              std::span<const BufferRef> inputs, BufferRef output,
                              const OpDesc& params) {
  if (current_task.runtime != this)
    raise(Errc::usage_error, "invoke_operator called outside a task of this runtime");
  const TaskId task = current_task.id;

  std::vector<HostTensor> in;
  for (BufferRef r : inputs) in.push_back(read_buffer(r));
  Request req;
  req.op = op;
  req.params = params;
  req.flags = flags;
  for (std::size_t i = 0; i < in.size() && i < 2; ++i) req.inputs[i] = &in[i];
  const InstructionProgram prog = lower(req, config_.profile, config_.mode);

  auto out_buf = buffer(output);
  if (out_buf->dim.rows != prog.output_shape.rows || out_buf->dim.cols != prog.output_shape.cols)
    raise(Errc::invalid_input, "output buffer dimension does not match the operator result");

  Batch batch;
  batch.pending = prog.instructions.size();
  batch.outputs.resize(prog.instructions.size());
  {
    std::lock_guard s(sched_mu_);
    const double ready = task_time_[task];
    double done = ready;
    opq_.push_back({task, op, std::vector<BufferRef>(inputs.begin(), inputs.end()), output, flags});
    TraceProgram tp{task, {}};
    const std::string fk = flags_key(flags);
    for (std::size_t i = 0; i < prog.instructions.size(); ++i) {
      const ProgramInstruction& p = prog.instructions[i];
      ScheduleItem item;
      item.task_id = task;
      item.flags_key = fk;
      item.kind = p.ins.op.kind;
      item.operand_count = p.ins.operand_count();
      for (int k = 0; k < item.operand_count; ++k) {
        item.operands[k] = p.ins.operands[k];
        item.operand_bytes[k] = static_cast<std::size_t>(prog.operand(p, k).real.size());
      }
      Slot slot = scheduler_.assign(item, ready);
      done = std::max(done, slot.finish_us);
      exec_log_.push_back({task, opq_.size() - 1, i, p.coord, item.kind, slot.device});
      counters_.instructions_by_kind[to_string(item.kind)] += 1;
      tp.items.push_back(std::move(item));
      Worker& w = *workers_[slot.device];
      {
        std::lock_guard wl(w.mu);
        w.queue.push_back({&prog, i, std::move(slot), &batch});
      }
      w.cv.notify_one();
    }
    task_time_[task] = done;
    trace_.push_back(std::move(tp));
    counters_.input_clamps += prog.input_clamps;
  }

  std::unique_lock bl(batch.mu);
  batch.cv.wait(bl, [&] { return batch.pending == 0; });
  {
    std::lock_guard s(sched_mu_);
    counters_.saturation_events += batch.saturation;
    counters_.overflow_events += batch.overflow;
  }
  if (!batch.error.empty()) raise(Errc::invalid_input, batch.error);
  if (config_.strict && (batch.saturation || batch.overflow || prog.input_clamps))
    raise(Errc::saturation, std::to_string(batch.saturation) + " saturated codes, " +
                                std::to_string(batch.overflow) + " accumulator overflows, " +
                                std::to_string(prog.input_clamps) + " clamped inputs in " +
                                to_string(op));
  write_buffer(output, assemble(prog, batch.outputs));
}

void Runtime::worker_loop(Worker& w) {
  for (;;) {
    Job job;
    {
      std::unique_lock lk(w.mu);
      w.cv.wait(lk, [&] { return w.stop || !w.queue.empty(); });
      if (w.queue.empty()) return;
      job = std::move(w.queue.front());
      w.queue.pop_front();
    }
    const ProgramInstruction& p = job.program->instructions[job.index];
    HostTensor result;
    std::string error;
    std::uint64_t sat = 0, ovf = 0;
    try {
      if (config_.mode == LowerMode::oracle) {
        std::vector<HostTensor> in;
        for (int k = 0; k < p.ins.operand_count(); ++k) in.push_back(job.program->operand(p, k).real);
        result = oracle_execute(p.ins.op, in);
      } else {
        for (BlockId id : job.slot.evictions) w.device.evict(id);
        w.device.advance_to(job.slot.start_us);
        for (int k = 0; k < p.ins.operand_count(); ++k) {
          const OperandTile& t = job.program->operand(p, k);
          if (!w.device.resident(t.id)) w.device.load(t.id, t.block);
        }
        const DeviceCounters before = w.device.counters();
        result = dequantize(w.device.execute(p.ins));
        sat = w.device.counters().saturation_events - before.saturation_events;
        ovf = w.device.counters().overflow_events - before.overflow_events;
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    {
      std::lock_guard bl(job.batch->mu);
      job.batch->outputs[job.index] = std::move(result);
      job.batch->saturation += sat;
      job.batch->overflow += ovf;
      if (!error.empty() && job.batch->error.empty()) job.batch->error = error;
      job.batch->pending -= 1;
    }
    job.batch->cv.notify_all();
  }
}

double Runtime::makespan_us() const {
  std::lock_guard s(sched_mu_);
  return scheduler_.makespan_us();
}

std::vector<TraceProgram> Runtime::trace() const {
  std::lock_guard s(sched_mu_);
  return trace_;
}

std::vector<IqEntry> Runtime::execution_log() const {
  std::lock_guard s(sched_mu_);
  return exec_log_;
}

std::vector<OpqEntry> Runtime::operation_log() const {
  std::lock_guard s(sched_mu_);
  return opq_;
}

RuntimeCounters Runtime::counters() const {
  std::lock_guard s(sched_mu_);
  return counters_;
}

std::vector<BlockId> Runtime::device_transfer_log(std::size_t device) const {
  Worker& w = *workers_.at(device);
  std::lock_guard lk(w.mu);
  return w.device.transfer_log();
}

double Runtime::device_clock_us(std::size_t device) const {
  Worker& w = *workers_.at(device);
  std::lock_guard lk(w.mu);
  return w.device.clock_us();
}

}  // namespace tpuemu
