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

#include <doctest.h>

#include <cstdio>
#include <algorithm>
#include <fstream>
#include <future>
#include <set>

#include "helpers.hpp"
#include "tpuemu/core/error.hpp"
#include "tpuemu/core/metrics.hpp"
#include "tpuemu/runtime/runtime.hpp"

using namespace tpuemu;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::usage_error;
}

void invoke(Runtime& rt, Operator op, std::initializer_list<BufferRef> in, BufferRef out, QuantFlags flags = {}) {
  const std::vector<BufferRef> v(in);
  rt.invoke_operator(op, flags, v, out);
}

ScheduleItem item(TaskId task, BlockId a, BlockId b = 0, std::size_t bytes = 128 * 128) {
  ScheduleItem it;
  it.task_id = task;
  it.kind = b ? OpKind::add : OpKind::relu;
  it.operand_count = b ? 2 : 1;
  it.operands = {a, b};
  it.operand_bytes = {bytes, b ? bytes : 0};
  return it;
}

}  // namespace

TEST_SUITE("buffers") {
  TEST_CASE("dimensions") {
    Runtime rt;
    const Dimension d = rt.alloc_dimension(2, 3);
    CHECK(d.rows == 2);
    CHECK(d.cols == 3);
    CHECK(rt.alloc_dimension(1, 1).rows == 1);
    CHECK(code_of([&] { rt.alloc_dimension(0, 5); }) == Errc::invalid_input);
  }

  TEST_CASE("create, read, write, release") {
    Runtime rt;
    const HostTensor four = testing::mat({{1, 2}, {3, 4}});
    const BufferRef b = rt.create_buffer(rt.alloc_dimension(2, 2), &four);
    CHECK(rt.read_buffer(b) == four);
    const HostTensor three = testing::mat({{1, 2, 3}});
    CHECK(code_of([&] { rt.create_buffer(rt.alloc_dimension(2, 2), &three); }) == Errc::invalid_input);
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(2, 2));
    rt.write_buffer(out, four);
    CHECK(rt.read_buffer(out) == four);
    CHECK(code_of([&] { rt.write_buffer(out, three); }) == Errc::invalid_input);
    rt.release_buffer(out);
    CHECK(code_of([&] { rt.read_buffer(out); }) == Errc::invalid_input);
  }
}

TEST_SUITE("tasks") {
  TEST_CASE("add inside a task matches the oracle") {
    Runtime rt;
    const HostTensor a = testing::random_matrix(128, 128, -1, 1, 1);
    const HostTensor b = testing::random_matrix(128, 128, -1, 1, 2);
    const BufferRef ba = rt.create_buffer(a), bb = rt.create_buffer(b);
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(128, 128));
    const TaskHandle h = rt.enqueue([&] { invoke(rt, Operator::add, {ba, bb}, out); });
    CHECK(rt.wait(h.task_id).state == TaskState::done);
    // Each input rounds within half of 1/127.5; the output bound is the summed
    // widths (4), so its half step is 2/127.5.
    CHECK((rt.read_buffer(out) - (a + b)).cwiseAbs().maxCoeff() <= 6.0 / 255 + 1e-9);
  }

  TEST_CASE("invoke outside a task is a usage error") {
    Runtime rt;
    const BufferRef a = rt.create_buffer(HostTensor::Ones(2, 2));
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(2, 2));
    CHECK(code_of([&] { invoke(rt, Operator::relu, {a}, out); }) == Errc::usage_error);
  }

  TEST_CASE("operators within a task run in order") {
    Runtime rt;
    const BufferRef a = rt.create_buffer(testing::mat({{1, 2}, {3, 4}}));
    const BufferRef mid = rt.create_buffer(rt.alloc_dimension(2, 2));
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(2, 2));
    const TaskHandle h = rt.enqueue([&] {
      invoke(rt, Operator::add, {a, a}, mid);
      invoke(rt, Operator::mul, {mid, a}, out);
    });
    rt.wait(h.task_id);
    CHECK(rt.read_buffer(out) == testing::mat({{2, 8}, {18, 32}}));
    const auto log = rt.operation_log();
    REQUIRE(log.size() == 2);
    CHECK(log[0].op == Operator::add);
    CHECK(log[1].op == Operator::mul);
  }

  TEST_CASE("independent gemm tasks both complete") {
    RuntimeConfig cfg;
    cfg.devices = 2;
    Runtime rt(cfg);
    const HostTensor a = testing::random_matrix(40, 30, 0, 4, 3), b = testing::random_matrix(30, 20, 0, 4, 4);
    const BufferRef ba = rt.create_buffer(a), bb = rt.create_buffer(b);
    const BufferRef o1 = rt.create_buffer(rt.alloc_dimension(40, 20)), o2 = rt.create_buffer(rt.alloc_dimension(40, 20));
    rt.enqueue([&] { invoke(rt, Operator::gemm, {ba, bb}, o1); });
    rt.enqueue([&] { invoke(rt, Operator::gemm, {ba, bb}, o2); });
    rt.sync();
    const HostTensor ref = testing::brute_gemm(a, b);
    CHECK(rt.read_buffer(o1) == rt.read_buffer(o2));
    CHECK(mape(ref, rt.read_buffer(o1)) < 0.01);
  }

  TEST_CASE("100 no-op tasks get distinct ids") {
    Runtime rt;
    std::set<TaskId> ids;
    for (int i = 0; i < 100; ++i) ids.insert(rt.enqueue([] {}).task_id);
    rt.sync();
    CHECK(ids.size() == 100);
  }

  TEST_CASE("sync and wait edge cases") {
    Runtime rt;
    rt.sync();
    CHECK(code_of([&] { rt.wait(12345); }) == Errc::invalid_input);
  }

  TEST_CASE("a failing task does not stop others") {
    Runtime rt;
    const TaskHandle bad = rt.enqueue([] { raise(Errc::invalid_input, "boom"); });
    const TaskHandle good = rt.enqueue([] {});
    CHECK(rt.wait(bad.task_id).state == TaskState::failed);
    CHECK(rt.task_error(bad.task_id).find("boom") != std::string::npos);
    CHECK(rt.wait(good.task_id).state == TaskState::done);
  }

  TEST_CASE("enqueue rejects a pending output as input") {
    Runtime rt;
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(2, 2));
    std::promise<void> release;
    std::shared_future<void> gate = release.get_future().share();
    const TaskHandle writer = rt.enqueue([gate] { gate.wait(); }, {{}, {out}});
    CHECK(code_of([&] { rt.enqueue([] {}, {{out}, {}}); }) == Errc::usage_error);
    release.set_value();
    rt.wait(writer.task_id);
    rt.wait(rt.enqueue([] {}, {{out}, {}}).task_id);
  }

  TEST_CASE("enqueue from several threads") {
    Runtime rt;
    const BufferRef a = rt.create_buffer(testing::random_matrix(64, 64, 0, 1, 5));
    std::vector<BufferRef> outs;
    for (int i = 0; i < 8; ++i) outs.push_back(rt.create_buffer(rt.alloc_dimension(64, 64)));
    std::vector<std::thread> producers;
    for (int i = 0; i < 8; ++i)
      producers.emplace_back([&, i] { rt.enqueue([&, i] { invoke(rt, Operator::relu, {a}, outs[static_cast<std::size_t>(i)]); }); });
    for (auto& t : producers) t.join();
    rt.sync();
    for (const BufferRef o : outs) CHECK(rt.read_buffer(o) == rt.read_buffer(outs[0]));
  }

  TEST_CASE("strict mode fails the task on clamped input") {
    RuntimeConfig cfg;
    cfg.strict = true;
    Runtime rt(cfg);
    const BufferRef a = rt.create_buffer(testing::mat({{10, 0}}));
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(1, 2));
    QuantFlags f;
    f.range_a = std::pair{0.0, 1.0};
    const TaskHandle h = rt.enqueue([&] { invoke(rt, Operator::relu, {a}, out, f); });
    CHECK(rt.wait(h.task_id).state == TaskState::failed);

    Runtime lenient;
    const BufferRef la = lenient.create_buffer(testing::mat({{10, 0}}));
    const BufferRef lout = lenient.create_buffer(lenient.alloc_dimension(1, 2));
    lenient.wait(lenient.enqueue([&] { invoke(lenient, Operator::relu, {la}, lout, f); }).task_id);
    CHECK(lenient.counters().input_clamps == 1);
  }

  TEST_CASE("oracle replay mode is exact") {
    RuntimeConfig cfg;
    cfg.mode = LowerMode::oracle;
    cfg.devices = 3;
    Runtime rt(cfg);
    const HostTensor a = testing::random_matrix(150, 70, -3, 3, 6), b = testing::random_matrix(70, 90, -3, 3, 7);
    const BufferRef ba = rt.create_buffer(a), bb = rt.create_buffer(b);
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(150, 90));
    rt.wait(rt.enqueue([&] { invoke(rt, Operator::gemm, {ba, bb}, out); }).task_id);
    CHECK(testing::max_relative_error(testing::brute_gemm(a, b), rt.read_buffer(out)) < 1e-12);
  }
}

TEST_SUITE("scheduling") {
  TEST_CASE("shared input within one task stays on one device and loads once") {
    Scheduler s(4, DeviceProfile{});
    std::set<std::size_t> used;
    for (BlockId out = 0; out < 4; ++out) used.insert(s.assign(item(1, 100, 200 + out), 0).device);
    CHECK(used.size() == 1);
    CHECK(s.load_count(100) == 1);
  }

  TEST_CASE("independent instructions spread one per device") {
    Scheduler s(8, DeviceProfile{});
    std::set<std::size_t> used;
    for (BlockId i = 0; i < 8; ++i) used.insert(s.assign(item(1, 10 + i), 0).device);
    CHECK(used.size() == 8);
  }

  TEST_CASE("one device runs in FIFO order") {
    Scheduler s(1, DeviceProfile{});
    double last = -1;
    for (BlockId i = 0; i < 10; ++i) {
      const Slot slot = s.assign(item(1 + i % 3, 10 + i), 0);
      CHECK(slot.start_us >= last);
      CHECK(slot.finish_us > slot.start_us);
      last = slot.finish_us;
    }
  }

  TEST_CASE("affinity in the runtime reuses the loaded input") {
    RuntimeConfig cfg;
    cfg.devices = 4;
    Runtime rt(cfg);
    // One vector tile times four model column blocks: four instructions sharing operand 0.
    const BufferRef v = rt.create_buffer(testing::random_matrix(1, 100, 0, 1, 8));
    const BufferRef w = rt.create_buffer(testing::random_matrix(100, 512, 0, 1, 9));
    const BufferRef out = rt.create_buffer(rt.alloc_dimension(1, 512));
    rt.wait(rt.enqueue([&] { invoke(rt, Operator::fully_connected, {v, w}, out); }).task_id);
    rt.sync();
    const auto log = rt.execution_log();
    REQUIRE(log.size() == 4);
    for (const auto& e : log) CHECK(e.device == log[0].device);
    const auto transfers = rt.device_transfer_log(log[0].device);
    const auto trace = rt.trace();
    REQUIRE(trace.size() == 1);
    const BlockId shared = trace[0].items[0].operands[0];
    CHECK(std::count(transfers.begin(), transfers.end(), shared) == 1);
  }

  TEST_CASE("every instruction executes exactly once") {
    RuntimeConfig cfg;
    cfg.devices = 3;
    Runtime rt(cfg);
    const BufferRef a = rt.create_buffer(testing::random_matrix(300, 260, 0, 1, 10));
    const BufferRef o1 = rt.create_buffer(rt.alloc_dimension(300, 260));
    const BufferRef o2 = rt.create_buffer(rt.alloc_dimension(1, 1));
    rt.enqueue([&] { invoke(rt, Operator::add, {a, a}, o1); });
    rt.enqueue([&] { invoke(rt, Operator::mean, {a}, o2); });
    rt.sync();
    const auto log = rt.execution_log();
    std::set<std::tuple<TaskId, std::size_t, std::size_t>> seen;
    for (const auto& e : log) seen.insert({e.task_id, e.opq_index, e.instruction});
    CHECK(seen.size() == log.size());
    CHECK(log.size() == 9 + 25);
    const auto c = rt.counters();
    CHECK(c.instructions_by_kind.at("add") == 9);
    CHECK(c.instructions_by_kind.at("mean") == 25);
  }

  TEST_CASE("independent equal-cost instructions scale near-linearly") {
    for (std::size_t d : {2, 4, 8}) {
      std::vector<TraceProgram> trace;
      for (TaskId t = 1; t <= 64; ++t) trace.push_back({t, {item(t, 1000 + t)}});
      const double one = simulate_makespan(trace, 1, {});
      const double many = simulate_makespan(trace, d, {});
      CHECK(one / many >= 0.9 * static_cast<double>(d));
    }
  }
}

TEST_CASE("runtime config file") {
  const std::string path = "test_runtime_config.ini";
  {
    std::ofstream f(path);
    f << "devices = 4\nstrict = true\nmode = oracle-replay\nops.conv2d = 20000\n";
  }
  const RuntimeConfig c = load_runtime_config(path);
  CHECK(c.devices == 4);
  CHECK(c.strict);
  CHECK(c.mode == LowerMode::oracle);
  CHECK(c.profile.ops_for(OpKind::conv2d) == 20000.0);
  {
    std::ofstream f(path);
    f << "devices = many\n";
  }
  CHECK(code_of([&] { load_runtime_config(path); }) == Errc::invalid_input);
  std::remove(path.c_str());
}
