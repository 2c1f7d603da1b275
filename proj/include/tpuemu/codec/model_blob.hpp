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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tpuemu/core/oracle.hpp"
#include "tpuemu/device/quantized_block.hpp"

namespace tpuemu::codec {

// Layout: header (120 bytes, last 4 = data size) | data | metadata | extension.
//   metadata:  padded rows u32, padded cols u32, scale f32
//   extension: logical rows u32, logical cols u32, zero point u8, kind u8, 2 reserved
// All multi-byte fields little-endian.
inline constexpr std::size_t kHeaderBytes = 120;
inline constexpr std::size_t kMetadataBytes = 12;
inline constexpr std::size_t kExtensionBytes = 12;
inline constexpr Index kPadEdge = 128;
inline constexpr char kMagic[] = "TPUEMU-MODEL";
inline constexpr std::uint32_t kFormatVersion = 1;

struct BlobMetadata {
  std::uint32_t data_bytes = 0;
  std::uint32_t padded_rows = 0;
  std::uint32_t padded_cols = 0;
  float scale = 1.0f;
  std::uint32_t logical_rows = 0;
  std::uint32_t logical_cols = 0;
  std::uint8_t zero_point = 0;
  OpKind kind = OpKind::fully_connected;
};

struct DecodedBlob {
  QuantizedBlock block;  // logical shape, padding stripped
  BlobMetadata metadata;
};

TensorShape padded_shape(TensorShape logical);

// Pads with the zero point so padding decodes to real zero.
CodeMatrix pad_codes(const QuantizedBlock& b);

std::vector<std::uint8_t> encode(const QuantizedBlock& block, OpKind kind);
DecodedBlob decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

}  // namespace tpuemu::codec
