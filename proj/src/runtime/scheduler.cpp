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

#include "tpuemu/runtime/scheduler.hpp"

#include <algorithm>
#include <limits>

#include "tpuemu/core/error.hpp"

namespace tpuemu {

Scheduler::Scheduler(std::size_t devices, DeviceProfile profile)
    : profile_(std::move(profile)), devices_(devices) {
  if (devices == 0) raise(Errc::invalid_input, "at least one device is required");
}

std::size_t Scheduler::pick(const ScheduleItem& item, double ready_us) {
  const AffinityKey key{item.task_id, item.operands[0], item.flags_key};
  if (auto it = pinned_.find(key); it != pinned_.end()) return it->second;
  std::size_t best = 0;
  double best_start = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < devices_.size(); ++d) {
    const double start = std::max(devices_[d].free_at_us, ready_us);
    if (start < best_start) {
      best_start = start;
      best = d;
    }
  }
  pinned_.emplace(key, best);
  return best;
}

Slot Scheduler::assign(const ScheduleItem& item, double ready_us) {
  Slot slot;
  slot.device = pick(item, ready_us);
  SimDevice& dev = devices_[slot.device];
  slot.start_us = std::max(dev.free_at_us, ready_us);
  double t = slot.start_us;

  for (int i = 0; i < item.operand_count; ++i) {
    const BlockId id = item.operands[i];
    const std::size_t bytes = item.operand_bytes[i];
    if (auto it = dev.resident.find(id); it != dev.resident.end()) {
      dev.lru.splice(dev.lru.begin(), dev.lru, it->second.second);
      continue;
    }
    while (dev.used_bytes + bytes > profile_.onchip_memory_bytes) {
      auto victim = std::find_if(dev.lru.rbegin(), dev.lru.rend(), [&](BlockId b) {
        return b != item.operands[0] && b != item.operands[1];
      });
      if (victim == dev.lru.rend())
        raise(Errc::planning_error, "instruction operands exceed device memory");
      const BlockId v = *victim;
      dev.used_bytes -= dev.resident[v].first;
      dev.lru.erase(dev.resident[v].second);
      dev.resident.erase(v);
      slot.evictions.push_back(v);
    }
    dev.lru.push_front(id);
    dev.resident.emplace(id, std::make_pair(bytes, dev.lru.begin()));
    dev.used_bytes += bytes;
    t += profile_.transfer_us(bytes);
    slot.loads.push_back(id);
    load_counts_[id] += 1;
  }
  t += profile_.instruction_us(item.kind);
  slot.finish_us = t;
  dev.free_at_us = t;
  return slot;
}

double Scheduler::makespan_us() const {
  double m = 0.0;
  for (const SimDevice& d : devices_) m = std::max(m, d.free_at_us);
  return m;
}

std::size_t Scheduler::load_count(BlockId id) const {
  auto it = load_counts_.find(id);
  return it == load_counts_.end() ? 0 : it->second;
}

void Scheduler::forget_affinity(TaskId task) {
  std::erase_if(pinned_, [task](const auto& kv) { return std::get<0>(kv.first) == task; });
}

double simulate_makespan(const std::vector<TraceProgram>& trace, std::size_t devices,
                         const DeviceProfile& profile) {
  Scheduler s(devices, profile);
  std::unordered_map<TaskId, double> task_time;
  for (const TraceProgram& p : trace) {
    const double ready = task_time[p.task_id];
    double done = ready;
    for (const ScheduleItem& item : p.items) done = std::max(done, s.assign(item, ready).finish_us);
    task_time[p.task_id] = done;
  }
  return s.makespan_us();
}

}  // namespace tpuemu
