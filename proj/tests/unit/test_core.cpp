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

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "tpuemu/core/apps.hpp"
#include "tpuemu/core/error.hpp"
#include "tpuemu/core/metrics.hpp"
#include "tpuemu/core/oracle.hpp"

using namespace tpuemu;
using testing::mat;

namespace {

HostTensor run(OpDesc op, std::initializer_list<HostTensor> in) {
  std::vector<HostTensor> v(in);
  return oracle_execute(op, v);
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::usage_error;
}

}  // namespace

TEST_SUITE("range_stats") {
  TEST_CASE("exact extrema at full fraction") {
    const RangeStats s = range_stats(mat({{1, 2}, {3, 4}}));
    CHECK(s.min == 1);
    CHECK(s.max == 4);
    CHECK_FALSE(s.sampled);
    CHECK(s.integral);
  }

  TEST_CASE("constant tensor") {
    const RangeStats s = range_stats(HostTensor::Constant(3, 5, 2.5));
    CHECK(s.min == 2.5);
    CHECK(s.max == 2.5);
    CHECK_FALSE(s.integral);
  }

  TEST_CASE("sampled stats stay inside the full-scan range and repeat per seed") {
    const HostTensor t = testing::random_matrix(1, 1000, 0, 128, 7);
    const RangeStats full = range_stats(t);
    const RangeStats a = range_stats(t, 0.1, 99);
    const RangeStats b = range_stats(t, 0.1, 99);
    CHECK(a.sampled);
    CHECK(a.min >= full.min);
    CHECK(a.max <= full.max);
    CHECK(a.min >= 0);
    CHECK(a.max < 128);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
  }

  TEST_CASE("full fraction equals a brute-force scan") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const HostTensor t = testing::random_matrix(1 + seed % 7, 3 + seed % 11, -50, 50, seed);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (Index i = 0; i < t.size(); ++i) {
        lo = std::min(lo, t.data()[i]);
        hi = std::max(hi, t.data()[i]);
      }
      const RangeStats s = range_stats(t);
      CHECK(s.min == lo);
      CHECK(s.max == hi);
    }
  }

  TEST_CASE("errors") {
    CHECK(code_of([] { range_stats(HostTensor(0, 0)); }) == Errc::invalid_input);
    CHECK(code_of([] { range_stats(mat({{1}}), 0.0); }) == Errc::invalid_input);
    CHECK(code_of([] { range_stats(mat({{1}}), 1.5); }) == Errc::invalid_input);
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("identity gives zero") {
    const HostTensor t = testing::random_matrix(5, 6, -3, 3, 1);
    CHECK(mape(t, t) == 0.0);
    CHECK(rmse_normalized(t, t) == 0.0);
    const HostTensor c = HostTensor::Constant(2, 2, 4.0);
    CHECK(rmse_normalized(c, c) == 0.0);
  }

  TEST_CASE("single element mape") { CHECK(mape(mat({{100}}), mat({{99}}), 1e-12) == doctest::Approx(0.01)); }

  TEST_CASE("mape matches a scalar loop") {
    const HostTensor ref = testing::random_matrix(8, 8, -10, 10, 3);
    const HostTensor got = testing::random_matrix(8, 8, -10, 10, 4);
    double sum = 0;
    for (Index i = 0; i < 64; ++i)
      sum += std::abs(got.data()[i] - ref.data()[i]) / std::max(std::abs(ref.data()[i]), 1e-9);
    CHECK(mape(ref, got) == doctest::Approx(sum / 64).epsilon(1e-12));
  }

  TEST_CASE("epsilon floors the denominator") {
    CHECK(mape(mat({{0}}), mat({{1e-9}}), 1e-9) == doctest::Approx(1.0));
  }

  TEST_CASE("rmse hand computation") {
    CHECK(rmse_normalized(mat({{0}, {10}}), mat({{1}, {9}})) == doctest::Approx(0.1));
  }

  TEST_CASE("rmse matches a scalar loop") {
    const HostTensor ref = testing::random_matrix(16, 16, 0, 5, 5);
    const HostTensor got = testing::random_matrix(16, 16, 0, 5, 6);
    double sq = 0, lo = ref(0, 0), hi = ref(0, 0);
    for (Index i = 0; i < 256; ++i) {
      sq += std::pow(got.data()[i] - ref.data()[i], 2);
      lo = std::min(lo, ref.data()[i]);
      hi = std::max(hi, ref.data()[i]);
    }
    CHECK(rmse_normalized(ref, got) == doctest::Approx(std::sqrt(sq / 256) / (hi - lo)).epsilon(1e-12));
  }

  TEST_CASE("errors") {
    CHECK(code_of([] { mape(mat({{1, 2}}), mat({{1}, {2}})); }) == Errc::invalid_input);
    CHECK(code_of([] { rmse_normalized(mat({{1, 2}}), mat({{1}, {2}})); }) == Errc::invalid_input);
    CHECK(code_of([] { rmse_normalized(mat({{3, 3}}), mat({{3, 4}})); }) == Errc::degenerate_range);
  }

  TEST_CASE("compare fills every field") {
    const ErrorReport r = compare(mat({{0}, {10}}), mat({{1}, {9}}));
    CHECK(r.count == 2);
    CHECK(r.max_abs_error == 1.0);
    CHECK(r.rmse_normalized == doctest::Approx(0.1));
    CHECK(r.mape >= 0);
  }
}

TEST_SUITE("oracle") {
  TEST_CASE("gemm identity and hand example") {
    CHECK(oracle_gemm(HostTensor::Identity(2, 2), mat({{5, 6}, {7, 8}})) == mat({{5, 6}, {7, 8}}));
    CHECK(oracle_gemm(mat({{1, 2}, {3, 4}}), mat({{5, 6}, {7, 8}})) == mat({{19, 22}, {43, 50}}));
  }

  TEST_CASE("gemm is associative on integer inputs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const HostTensor a = testing::random_integers(8, 8, -9, 9, seed);
      const HostTensor b = testing::random_integers(8, 8, -9, 9, seed + 100);
      const HostTensor c = testing::random_integers(8, 8, -9, 9, seed + 200);
      const HostTensor l = oracle_gemm(oracle_gemm(a, b), c);
      const HostTensor r = oracle_gemm(a, oracle_gemm(b, c));
      CHECK(testing::max_relative_error(l, r) <= 1e-9);
      CHECK(testing::max_relative_error(testing::brute_gemm(a, b), oracle_gemm(a, b)) == 0.0);
    }
  }

  TEST_CASE("conv2d with a zero kernel is zero") {
    OpDesc op;
    op.kind = OpKind::conv2d;
    const HostTensor out = run(op, {testing::random_matrix(6, 5, -1, 1, 2), HostTensor::Zero(3, 3)});
    CHECK(out.isZero());
    CHECK(shape_of(out) == TensorShape{6, 5});
  }

  TEST_CASE("one-hot kernel at the origin returns the input") {
    OpDesc op;
    op.kind = OpKind::conv2d;
    HostTensor k = HostTensor::Zero(3, 3);
    k(0, 0) = 1;
    const HostTensor x = testing::random_matrix(7, 4, -5, 5, 3);
    CHECK(run(op, {x, k}) == x);
  }

  TEST_CASE("strided conv2d matches a direct loop with zero padding") {
    OpDesc op;
    op.kind = OpKind::conv2d;
    op.stride = {2, 3};
    const HostTensor x = testing::random_matrix(7, 8, -2, 2, 4);
    const HostTensor k = testing::random_matrix(3, 2, -2, 2, 5);
    const HostTensor out = run(op, {x, k});
    REQUIRE(shape_of(out) == TensorShape{4, 3});
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 3; ++j) {
        double s = 0;
        for (Index u = 0; u < 3; ++u)
          for (Index v = 0; v < 2; ++v) {
            const Index r = i * 2 + u, c = j * 3 + v;
            if (r < 7 && c < 8) s += x(r, c) * k(u, v);
          }
        CHECK(out(i, j) == doctest::Approx(s));
      }
  }

  TEST_CASE("stacked kernels fill consecutive column blocks") {
    OpDesc op;
    op.kind = OpKind::conv2d;
    op.kernel_count = 2;
    const HostTensor x = testing::random_matrix(4, 4, -1, 1, 6);
    HostTensor k = HostTensor::Zero(4, 2);
    k(0, 0) = 1;
    k(2, 0) = 2;
    const HostTensor out = run(op, {x, k});
    REQUIRE(shape_of(out) == TensorShape{4, 8});
    CHECK(out.leftCols(4) == x);
    CHECK(out.rightCols(4) == 2 * x);
  }

  TEST_CASE("pairwise, reduce, activation, reshape") {
    const HostTensor a = mat({{1, -2}, {3, 4}}), b = mat({{2, 2}, {-1, 0.5}});
    OpDesc op;
    op.kind = OpKind::add;
    CHECK(run(op, {a, b}) == mat({{3, 0}, {2, 4.5}}));
    op.kind = OpKind::sub;
    CHECK(run(op, {a, b}) == mat({{-1, -4}, {4, 3.5}}));
    op.kind = OpKind::mul;
    CHECK(run(op, {a, b}) == mat({{2, -4}, {-3, 2}}));
    op.kind = OpKind::mean;
    CHECK(run(op, {a})(0, 0) == doctest::Approx(1.5));
    op.kind = OpKind::max;
    CHECK(run(op, {a})(0, 0) == 4);
    op.kind = OpKind::relu;
    CHECK(run(op, {a}) == mat({{1, 0}, {3, 4}}));
    op.kind = OpKind::tanh;
    CHECK(run(op, {a})(0, 1) == doctest::Approx(std::tanh(-2.0)));
    op.kind = OpKind::crop;
    op.window = {1, 0, 1, 2};
    CHECK(run(op, {a}) == mat({{3, 4}}));
    op.kind = OpKind::ext;
    op.target = {3, 3};
    CHECK(run(op, {a}) == mat({{1, -2, 0}, {3, 4, 0}, {0, 0, 0}}));
  }

  TEST_CASE("fully connected treats rows as vectors") {
    OpDesc op;
    op.kind = OpKind::fully_connected;
    CHECK(run(op, {mat({{1, 2}, {0, 1}}), mat({{1, 0, 2}, {3, 1, 0}})}) == mat({{7, 2, 2}, {3, 1, 0}}));
  }

  TEST_CASE("shape errors") {
    OpDesc op;
    op.kind = OpKind::add;
    CHECK(code_of([&] { run(op, {mat({{1, 2}}), mat({{1}})}); }) == Errc::invalid_input);
    op.kind = OpKind::fully_connected;
    CHECK(code_of([&] { run(op, {mat({{1, 2}}), mat({{1}})}); }) == Errc::invalid_input);
    op.kind = OpKind::crop;
    op.window = {1, 1, 2, 2};
    CHECK(code_of([&] { run(op, {mat({{1, 2}, {3, 4}})}); }) == Errc::invalid_input);
    op.kind = OpKind::conv2d;
    op.stride = {0, 1};
    CHECK(code_of([&] { run(op, {mat({{1, 2}}), mat({{1}})}); }) == Errc::invalid_input);
  }

  TEST_CASE("centred convolution through a flipped kernel and shifted input") {
    const HostTensor x = testing::random_matrix(6, 6, -1, 1, 8);
    const HostTensor k = testing::random_matrix(3, 3, -1, 1, 9);
    OpDesc op;
    op.kind = OpKind::conv2d;
    const HostTensor shifted = centered_input(x, 3);
    const HostTensor out = run(op, {shifted, flip_kernel(k)});
    const HostTensor expect = oracle_centered_conv2d(x, k);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) {
        double s = 0;
        for (Index u = -1; u <= 1; ++u)
          for (Index v = -1; v <= 1; ++v) {
            const Index r = i - u, c = j - v;
            if (r >= 0 && r < 6 && c >= 0 && c < 6) s += x(r, c) * k(u + 1, v + 1);
          }
        CHECK(expect(i, j) == doctest::Approx(s));
      }
    REQUIRE(out.rows() >= 6);
    REQUIRE(out.cols() >= 6);
    CHECK(testing::max_relative_error(expect, out.topLeftCorner(6, 6)) < 1e-12);
  }

  TEST_CASE("op kind names round-trip") {
    for (OpKind k : kAllOpKinds) CHECK(parse_op_kind(to_string(k)) == k);
    CHECK_FALSE(parse_op_kind("gemm").has_value());
  }
}

TEST_SUITE("application oracles") {
  TEST_CASE("pagerank of a symmetric pair") {
    const HostTensor r = oracle_pagerank(mat({{0, 1}, {1, 0}}), 10);
    CHECK(r(0, 0) == doctest::Approx(0.5));
    CHECK(r(1, 0) == doctest::Approx(0.5));
  }

  TEST_CASE("lud of diag(2,3) and gaussian 2x2") {
    const LuFactors f = oracle_lud(mat({{2, 0}, {0, 3}}));
    CHECK(f.lower == HostTensor::Identity(2, 2));
    CHECK(f.upper == mat({{2, 0}, {0, 3}}));
    const HostTensor x = oracle_gaussian(mat({{2, 0}, {0, 4}}), mat({{2}, {8}}));
    CHECK(x == mat({{1}, {2}}));
    CHECK(code_of([] { oracle_lud(mat({{0, 1}, {1, 0}})); }) == Errc::singular_matrix);
  }

  TEST_CASE("normal cdf and put-call parity") {
    CHECK(normal_cdf(0) == doctest::Approx(0.5));
    HostTensor o = HostTensor::Zero(2, kOptionColumns);
    for (Index i = 0; i < 2; ++i) {
      o(i, option_col::spot) = 100;
      o(i, option_col::strike) = 95;
      o(i, option_col::rate) = 0.05;
      o(i, option_col::volatility) = 0.2;
      o(i, option_col::time) = 1;
    }
    o(1, option_col::type) = 1;
    const HostTensor p = oracle_blackscholes(o);
    CHECK(p(0, 0) - p(1, 0) == doctest::Approx(100 - 95 * std::exp(-0.05)));
  }

  TEST_CASE("hotspot3d is a fixed point on a uniform ambient grid") {
    const auto c = HotspotCoefficients::for_grid(8, 8, 2);
    const LayerStack t(2, HostTensor::Constant(8, 8, c.ambient));
    const LayerStack p(2, HostTensor::Zero(8, 8));
    const LayerStack out = oracle_hotspot3d(t, p, 3, c);
    for (const auto& l : out) CHECK((l.array() - c.ambient).abs().maxCoeff() < 1e-9);
  }
}
