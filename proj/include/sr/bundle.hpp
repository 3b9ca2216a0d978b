// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// SALB adapter-library bundles.
//
//   offset 0   4 bytes   magic "SALB"
//   offset 4   u32 LE    format version (1)
//   offset 8   u64 LE    header length H in bytes
//   offset 16  H bytes   UTF-8 JSON header
//   offset 16+H          payload: float32 LE row-major tensors, back to back
//
// The header lists layers, experts, ranks, mode, and for every tensor its
// shape and byte offset relative to the payload start. Raw bundles store B then
// A per expert; aligned bundles store B_star, A_star, singular_values (1 x r).

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"  // nlohmann/json, vendored

#include "sr/adapter.hpp"

namespace sr {

inline constexpr char kBundleMagic[4] = {'S', 'A', 'L', 'B'};
inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr std::size_t kBundlePreambleBytes = 16;

// Throws ValidationError if the library does not pass validate_library.
std::vector<std::uint8_t> encode_bundle(const AdapterLibrary& lib);
// Throws a ParseError subclass (MagicError, VersionError, TruncatedError,
// MetadataError); never returns a partially decoded library.
AdapterLibrary decode_bundle(std::span<const std::uint8_t> bytes);

void save_bundle(const AdapterLibrary& lib, const std::filesystem::path& path);
AdapterLibrary load_bundle(const std::filesystem::path& path);

struct BundleHeader {
  nlohmann::json header;
  std::uint64_t header_bytes = 0;
  std::uint64_t payload_bytes = 0;
  std::size_t tensor_count = 0;
  std::size_t layer_count = 0;
  std::size_t experts_per_layer = 0;
};

// Reads and checks the preamble and JSON header only; the payload is never read.
BundleHeader read_bundle_header(const std::filesystem::path& path);

}  // namespace sr
