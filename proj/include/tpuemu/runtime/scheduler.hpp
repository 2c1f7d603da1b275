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

#include <array>
#include <cstdint>
#include <list>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "tpuemu/device/device.hpp"

namespace tpuemu {

using TaskId = std::uint64_t;

// What the scheduler needs to know about one back-end instruction.
struct ScheduleItem {
  TaskId task_id = 0;
  std::string flags_key;  // identical quantization flags compare equal
  OpKind kind = OpKind::add;
  int operand_count = 1;
  std::array<BlockId, 2> operands{};
  std::array<std::size_t, 2> operand_bytes{};
};

// The scheduler's decision for one item, replayed verbatim by the device worker.
struct Slot {
  std::size_t device = 0;
  double start_us = 0.0;
  double finish_us = 0.0;
  std::vector<BlockId> evictions;
  std::vector<BlockId> loads;
};

// Assigns instructions to devices in submission order over simulated time.
// Instructions with the same task, flags and input operand are pinned to the
// device that received the first of them; all others go to the device that
// can start earliest, ties to the lowest index. Each device runs one
// instruction at a time and keeps loaded blocks until space is needed
// (least recently used first).
class Scheduler {
 public:
  Scheduler(std::size_t devices, DeviceProfile profile);

  Slot assign(const ScheduleItem& item, double ready_us);

  std::size_t devices() const { return devices_.size(); }
  double makespan_us() const;
  // Loads of `id` across all devices so far.
  std::size_t load_count(BlockId id) const;
  void forget_affinity(TaskId task);

 private:
  struct SimDevice {
    double free_at_us = 0.0;
    std::size_t used_bytes = 0;
    std::list<BlockId> lru;  // front = most recent
    std::unordered_map<BlockId, std::pair<std::size_t, std::list<BlockId>::iterator>> resident;
  };
  using AffinityKey = std::tuple<TaskId, BlockId, std::string>;

  std::size_t pick(const ScheduleItem& item, double ready_us);

  DeviceProfile profile_;
  std::vector<SimDevice> devices_;
  std::map<AffinityKey, std::size_t> pinned_;
  std::unordered_map<BlockId, std::size_t> load_counts_;
};

// One lowered program as seen by the scheduler, in submission order.
struct TraceProgram {
  TaskId task_id = 0;
  std::vector<ScheduleItem> items;
};

// Makespan of a recorded trace replayed on `devices` devices. Programs of one
// task run back to back; programs of different tasks may overlap.
double simulate_makespan(const std::vector<TraceProgram>& trace, std::size_t devices,
                         const DeviceProfile& profile);

}  // namespace tpuemu
