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

#include <chrono>
#include <cstring>
#include <random>

#include "tpuemu/codec/model_blob.hpp"
#include "tpuemu/core/error.hpp"

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

QuantizedBlock patterned(Index rows, Index cols, int a, int b, int c, float scale, std::uint8_t zp) {
  QuantizedBlock q;
  q.codes.resize(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index k = 0; k < cols; ++k) q.codes(r, k) = static_cast<std::uint8_t>((r * a + k * b + c) % 256);
  q.scale = scale;
  q.zero_point = zp;
  return q;
}

QuantizedBlock random_block(std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> dim(1, 300);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_real_distribution<float> scale(1e-3f, 1e3f);
  QuantizedBlock q;
  q.codes.resize(dim(rng), dim(rng));
  for (Index i = 0; i < q.codes.size(); ++i) q.codes.data()[i] = static_cast<std::uint8_t>(byte(rng));
  q.scale = scale(rng);
  q.zero_point = static_cast<std::uint8_t>(byte(rng));
  return q;
}

std::uint32_t u32_at(const std::vector<std::uint8_t>& b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (std::uint32_t{b[at + 3]} << 24);
}

std::vector<std::uint8_t> fixture(const char* name) {
  return codec::read_file(std::string(TPUEMU_FIXTURES) + "/" + name);
}

}  // namespace

TEST_CASE("1x1 block pads to one 128x128 tile with a little-endian scale") {
  QuantizedBlock q;
  q.codes = CodeMatrix::Constant(1, 1, 7);
  const auto bytes = codec::encode(q, OpKind::fully_connected);
  REQUIRE(bytes.size() == 120 + 16384 + 24);
  CHECK(u32_at(bytes, 116) == 16384);
  const std::size_t meta = 120 + 16384;
  CHECK(u32_at(bytes, meta) == 128);
  CHECK(u32_at(bytes, meta + 4) == 128);
  CHECK(bytes[meta + 8] == 0x00);
  CHECK(bytes[meta + 9] == 0x00);
  CHECK(bytes[meta + 10] == 0x80);
  CHECK(bytes[meta + 11] == 0x3F);
  CHECK(bytes[120] == 7);
  CHECK(bytes[121] == 0);
}

TEST_CASE("130x5 block pads to 256x128 and keeps its logical shape") {
  const QuantizedBlock q = patterned(130, 5, 7, 3, 0, 0.5f, 128);
  const auto bytes = codec::encode(q, OpKind::conv2d);
  CHECK(u32_at(bytes, 116) == 256 * 128);
  const auto d = codec::decode(bytes);
  CHECK(d.metadata.padded_rows == 256);
  CHECK(d.metadata.padded_cols == 128);
  CHECK(d.metadata.logical_rows == 130);
  CHECK(d.metadata.logical_cols == 5);
  CHECK(d.metadata.kind == OpKind::conv2d);
  CHECK(d.block == q);
  // Padding decodes to real zero.
  CHECK(bytes[120 + 5] == 128);
  CHECK(bytes[120 + 200 * 128] == 128);
}

TEST_CASE("2048x2048 size field") {
  const auto bytes = codec::encode(patterned(2048, 2048, 31, 17, 5, 2.0f, 0), OpKind::fully_connected);
  CHECK(u32_at(bytes, 116) == 4194304);
}

TEST_CASE("golden fixtures match byte for byte") {
  CHECK(codec::encode(patterned(1, 1, 0, 0, 7, 1.0f, 0), OpKind::fully_connected) == fixture("block_1x1.blob"));
  CHECK(codec::encode(patterned(130, 5, 7, 3, 0, 0.5f, 128), OpKind::conv2d) == fixture("block_130x5.blob"));
  CHECK(codec::encode(patterned(2048, 2048, 31, 17, 5, 2.0f, 0), OpKind::fully_connected) ==
        fixture("block_2048x2048.blob"));
}

TEST_CASE("round trip over random shapes") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const QuantizedBlock q = random_block(rng);
    const auto d = codec::decode(codec::encode(q, OpKind::mul));
    CHECK(d.block == q);
    CHECK(d.metadata.kind == OpKind::mul);
  }
}

TEST_CASE("malformed input") {
  const auto good = codec::encode(patterned(3, 3, 1, 1, 0, 1.0f, 0), OpKind::add);
  CHECK(code_of([&] { codec::decode(std::span(good.data(), 119)); }) == Errc::malformed_blob);
  CHECK(code_of([&] { codec::decode(std::span(good.data(), good.size() - 1)); }) == Errc::malformed_blob);

  auto bad = good;
  bad[0] ^= 0xFF;
  CHECK(code_of([&] { codec::decode(bad); }) == Errc::malformed_blob);

  bad = good;
  bad[116] = 100;  // claims 100 bytes
  CHECK(code_of([&] { codec::decode(bad); }) == Errc::malformed_blob);

  for (float s : {0.0f, -1.0f}) {
    bad = good;
    std::memcpy(&bad[120 + 128 * 128 + 8], &s, 4);
    CHECK(code_of([&] { codec::decode(bad); }) == Errc::malformed_blob);
  }

  bad = good;
  bad[120 + 128 * 128 + 12] = 200;  // logical rows beyond padded rows
  CHECK(code_of([&] { codec::decode(bad); }) == Errc::malformed_blob);
}

TEST_CASE("2K x 2K encode is fast") {
  const QuantizedBlock q = patterned(2048, 2048, 31, 17, 5, 2.0f, 0);
  const auto start = std::chrono::steady_clock::now();
  const auto bytes = codec::encode(q, OpKind::fully_connected);
  const std::chrono::duration<double, std::milli> ms = std::chrono::steady_clock::now() - start;
  CHECK(bytes.size() == 120 + 4194304 + 24);
  CHECK(ms.count() < 100.0);
}

TEST_CASE("file round trip and checksum") {
  const auto bytes = codec::encode(patterned(10, 20, 3, 5, 1, 0.25f, 128), OpKind::add);
  codec::write_file("test_codec_tmp.blob", bytes);
  CHECK(codec::read_file("test_codec_tmp.blob") == bytes);
  std::remove("test_codec_tmp.blob");
  const std::uint8_t abc[] = {'a', 'b', 'c'};
  CHECK(codec::crc32(abc) == 0x352441C2u);
}
