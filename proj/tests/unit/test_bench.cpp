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
#include <fstream>
#include <sstream>

#include "tpuemu/bench/bench.hpp"
#include "tpuemu/core/error.hpp"

using namespace tpuemu;
using namespace tpuemu::bench;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

RuntimeConfig devices(std::size_t d, LowerMode mode = LowerMode::quantized) {
  RuntimeConfig c;
  c.devices = d;
  c.mode = mode;
  return c;
}

}  // namespace

TEST_SUITE("characterize") {
  TEST_CASE("recovers the seeded conv2d rate") {
    DeviceProfile p;
    p.ops[static_cast<std::size_t>(OpKind::conv2d)] = 10268.80;
    const Characterization c = characterize(OpKind::conv2d, {256, 256}, p);
    CHECK(c.ops == doctest::Approx(10268.80).epsilon(1e-3));
    CHECK(c.sample.t2_us > c.sample.t1_us);
  }

  TEST_CASE("closure for every kind and several shapes") {
    const DeviceProfile p;
    for (OpKind k : kAllOpKinds)
      for (TensorShape s : {TensorShape{16, 16}, TensorShape{128, 64}, TensorShape{300, 200}})
        CHECK(characterize(k, s, p).ops == doctest::Approx(p.ops_for(k)).epsilon(1e-3));
  }

  TEST_CASE("same-size output gives RPS equal to OPS times elements") {
    const Characterization c = characterize(OpKind::add, {100, 50});
    CHECK(c.rps == doctest::Approx(c.ops * 5000).epsilon(1e-9));
  }

  TEST_CASE("one megabyte at 6 ms per megabyte") {
    const Characterization c = characterize(OpKind::relu, {1024, 1024});
    CHECK(c.sample.input_bytes == (1u << 20));
    REQUIRE(c.exchange_rate.has_value());
    CHECK(*c.exchange_rate == doctest::Approx(double(1 << 20) / 6e-3).epsilon(1e-3));
  }

  TEST_CASE("non-positive transfer window is reported as absent") {
    CharacterizationSample s;
    s.t1_us = 100;
    s.t2_us = 250;
    s.r1 = 10;
    s.r2 = 20;
    const Characterization c = derive(s);
    CHECK(c.ops == doctest::Approx(kShortLoop / 150e-6));
    CHECK_FALSE(c.exchange_rate.has_value());
  }
}

TEST_SUITE("run_app") {
  TEST_CASE("gemm 256 below one percent") {
    RunOptions o;
    o.range = std::pair{0.0, 128.0};
    const RunReport r = run_app(o, devices(1));
    CHECK(r.error.mape < 0.01);
    CHECK(r.saturation_events == 0);
    CHECK(r.overflow_events == 0);
    CHECK(r.instructions.at("conv2d") > 0);
  }

  TEST_CASE("oracle replay is exact for every app") {
    for (const auto& app : kApps) {
      CAPTURE(app);
      RunOptions o;
      o.app = app;
      o.size = app == "blackscholes" ? 500 : 48;
      const RunReport r = run_app(o, devices(2, LowerMode::oracle));
      CHECK(r.error.mape <= 1e-12);
      CHECK(r.input.mode == "oracle-replay");
      CHECK(r.makespan_us.size() == 2);
    }
  }

  TEST_CASE("gemm 256 on 8 devices") {
    RunOptions o;
    o.range = std::pair{0.0, 128.0};
    const RunReport r = run_app(o, devices(8));
    REQUIRE(r.makespan_us.size() == 8);
    CHECK(r.makespan_us[0] / r.makespan_us[7] >= 6.0);
  }

  TEST_CASE("unknown app and bad sizes") {
    RunOptions o;
    o.app = "fft";
    CHECK_THROWS_AS(run_app(o), Error);
    o.app = "gemm";
    o.size = 0;
    CHECK_THROWS_AS(run_app(o), Error);
  }
}

TEST_SUITE("reports") {
  RunReport small_run() {
    RunOptions o;
    o.app = "pagerank";
    o.size = 64;
    return run_app(o, devices(3));
  }

  TEST_CASE("same seed gives byte-identical reports") {
    const RunReport a = small_run(), b = small_run();
    CHECK(to_json(a) == to_json(b));
    CHECK(to_csv(a) == to_csv(b));
  }

  TEST_CASE("csv header and provenance") {
    const std::string csv = to_csv(small_run());
    CHECK(csv.rfind("metric,value,unit,provenance\n", 0) == 0);
    CHECK(csv.find(",simulated") != std::string::npos);
    CHECK(csv.find(",measured") != std::string::npos);
  }

  TEST_CASE("json round trip through files") {
    RunReport r = small_run();
    r.wall_seconds = 0.125;
    const std::string path = "test_bench_report.json";
    write_report(r, "json", path);
    CHECK(load_report(path) == r);
    CHECK(from_json(slurp(path)) == r);
    std::remove(path.c_str());
  }

  TEST_CASE("write errors") {
    const RunReport r = small_run();
    try {
      write_report(r, "xml", "x.xml");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::usage_error);
    }
    try {
      write_report(r, "json", "/nonexistent-dir/report.json");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_input);
    }
  }

  TEST_CASE("loader rejects another schema version") {
    RunReport r = small_run();
    r.schema_version = kReportSchemaVersion + 1;
    CHECK_THROWS_AS(from_json(to_json(r)), Error);
  }
}
