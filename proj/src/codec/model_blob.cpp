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

#include "tpuemu/codec/model_blob.hpp"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tpuemu/core/error.hpp"

namespace tpuemu::codec {
namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{p[i]} << (8 * i);
  return v;
}

void check_header_magic(const std::uint8_t* p) {
  if (std::memcmp(p, kMagic, sizeof(kMagic)) != 0) raise(Errc::malformed_blob, "bad magic");
  if (get_u32(p + 16) != kFormatVersion) raise(Errc::malformed_blob, "unsupported format version");
}

}  // namespace

TensorShape padded_shape(TensorShape logical) {
  auto up = [](Index v) { return (v + kPadEdge - 1) / kPadEdge * kPadEdge; };
  return {up(logical.rows), up(logical.cols)};
}

CodeMatrix pad_codes(const QuantizedBlock& b) {
  const TensorShape p = padded_shape(b.shape());
  CodeMatrix out = CodeMatrix::Constant(p.rows, p.cols, b.zero_point);
  out.topLeftCorner(b.codes.rows(), b.codes.cols()) = b.codes;
  return out;
}

std::vector<std::uint8_t> encode(const QuantizedBlock& block, OpKind kind) {
  check_block(block);
  const CodeMatrix data = pad_codes(block);
  const auto data_bytes = static_cast<std::size_t>(data.size());
  if (data_bytes > 0xFFFFFFFFu) raise(Errc::invalid_input, "block too large for a 32-bit size field");

  std::vector<std::uint8_t> out(kHeaderBytes + data_bytes + kMetadataBytes + kExtensionBytes, 0);
  std::uint8_t* p = out.data();
  std::memcpy(p, kMagic, sizeof(kMagic));
  put_u32(p + 16, kFormatVersion);
  put_u32(p + kHeaderBytes - 4, static_cast<std::uint32_t>(data_bytes));
  p += kHeaderBytes;

  std::memcpy(p, data.data(), data_bytes);
  p += data_bytes;

  put_u32(p, static_cast<std::uint32_t>(data.rows()));
  put_u32(p + 4, static_cast<std::uint32_t>(data.cols()));
  put_u32(p + 8, std::bit_cast<std::uint32_t>(block.scale));
  p += kMetadataBytes;

  put_u32(p, static_cast<std::uint32_t>(block.codes.rows()));
  put_u32(p + 4, static_cast<std::uint32_t>(block.codes.cols()));
  p[8] = block.zero_point;
  p[9] = static_cast<std::uint8_t>(kind);
  return out;
}

DecodedBlob decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) raise(Errc::malformed_blob, "shorter than the 120-byte header");
  const std::uint8_t* p = bytes.data();
  check_header_magic(p);

  BlobMetadata m;
  m.data_bytes = get_u32(p + kHeaderBytes - 4);
  const std::size_t expected = kHeaderBytes + std::size_t{m.data_bytes} + kMetadataBytes + kExtensionBytes;
  if (bytes.size() != expected)
    raise(Errc::malformed_blob, "size field says " + std::to_string(m.data_bytes) +
                                    " data bytes but blob length implies " +
                                    std::to_string(static_cast<long long>(bytes.size()) -
                                                   static_cast<long long>(expected - m.data_bytes)));

  const std::uint8_t* data = p + kHeaderBytes;
  const std::uint8_t* meta = data + m.data_bytes;
  const std::uint8_t* ext = meta + kMetadataBytes;
  m.padded_rows = get_u32(meta);
  m.padded_cols = get_u32(meta + 4);
  m.scale = std::bit_cast<float>(get_u32(meta + 8));
  m.logical_rows = get_u32(ext);
  m.logical_cols = get_u32(ext + 4);
  m.zero_point = ext[8];

  if (std::uint64_t{m.padded_rows} * m.padded_cols != m.data_bytes)
    raise(Errc::malformed_blob, "rows x cols disagrees with the data size");
  if (!(m.scale > 0.0f) || !std::isfinite(m.scale)) raise(Errc::malformed_blob, "non-positive scale");
  if (m.logical_rows == 0 || m.logical_cols == 0 || m.logical_rows > m.padded_rows ||
      m.logical_cols > m.padded_cols)
    raise(Errc::malformed_blob, "logical shape outside the padded shape");
  if (ext[9] >= kAllOpKinds.size()) raise(Errc::malformed_blob, "unknown instruction kind");
  m.kind = static_cast<OpKind>(ext[9]);

  DecodedBlob out;
  out.metadata = m;
  out.block.scale = m.scale;
  out.block.zero_point = m.zero_point;
  const Eigen::Map<const CodeMatrix> padded(data, m.padded_rows, m.padded_cols);
  out.block.codes = padded.topLeftCorner(m.logical_rows, m.logical_cols);
  return out;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::invalid_input, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::invalid_input, "cannot write " + path);
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  return static_cast<std::uint32_t>(
      ::crc32_z(::crc32(0L, Z_NULL, 0), bytes.data(), bytes.size()));
}

}  // namespace tpuemu::codec
