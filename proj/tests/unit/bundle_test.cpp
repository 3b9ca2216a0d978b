// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "sr/bundle.hpp"
#include "sr/errors.hpp"

namespace fs = std::filesystem;
using Bytes = std::vector<std::uint8_t>;

namespace {

// Every stored scalar must equal the float32 rounding of the original.
void expect_float32_equal(const sr::Matrix& loaded, const sr::Matrix& original) {
  ASSERT_EQ(loaded.rows(), original.rows());
  ASSERT_EQ(loaded.cols(), original.cols());
  for (std::size_t i = 0; i < loaded.values().size(); ++i) {
    const float want = static_cast<float>(original.values()[i]);
    ASSERT_EQ(std::bit_cast<std::uint32_t>(static_cast<float>(loaded.values()[i])),
              std::bit_cast<std::uint32_t>(want));
    ASSERT_EQ(loaded.values()[i], static_cast<double>(want));
  }
}

std::uint64_t read_u64(const Bytes& b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  return v;
}

void write_u64(Bytes& b, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

Bytes with_header(const Bytes& original, const std::string& header) {
  const std::uint64_t old_len = read_u64(original, 8);
  Bytes out(original.begin(), original.begin() + 16);
  write_u64(out, 8, header.size());
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), original.begin() + 16 + static_cast<std::ptrdiff_t>(old_len), original.end());
  return out;
}

std::string header_text(const Bytes& b) {
  const auto len = read_u64(b, 8);
  return std::string(b.begin() + 16, b.begin() + 16 + static_cast<std::ptrdiff_t>(len));
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sr_bundle_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

}  // namespace

TEST(Bundle, EmptyLibraryRoundTrip) {
  const sr::AdapterLibrary lib;
  const auto back = sr::decode_bundle(sr::encode_bundle(lib));
  EXPECT_EQ(back.mode, sr::LibraryMode::raw);
  EXPECT_TRUE(back.layers.empty());
}

TEST(Bundle, RawRoundTripIsBitExact) {
  const auto lib = fixture::random_library(2, 3, 7, 5, 2, 1);
  const Bytes bytes = sr::encode_bundle(lib);
  const auto back = sr::decode_bundle(bytes);
  ASSERT_EQ(back.layers.size(), 2u);
  EXPECT_EQ(back.expert_ids(), lib.expert_ids());
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(back.layers[l].layer_id, lib.layers[l].layer_id);
    EXPECT_EQ(back.layers[l].d_in, 5u);
    EXPECT_EQ(back.layers[l].d_out, 7u);
    for (std::size_t t = 0; t < 3; ++t) {
      expect_float32_equal(back.layers[l].raw[t].b, lib.layers[l].raw[t].b);
      expect_float32_equal(back.layers[l].raw[t].a, lib.layers[l].raw[t].a);
      EXPECT_EQ(back.layers[l].raw[t].layer_id, lib.layers[l].layer_id);
    }
  }
  // the payload of a re-encoded copy is byte identical
  EXPECT_EQ(sr::encode_bundle(back), bytes);
}

TEST(Bundle, AlignedRoundTrip) {
  const auto lib = sr::align_library(fixture::random_library(1, 2, 6, 4, 3, 2));
  const auto back = sr::decode_bundle(sr::encode_bundle(lib));
  ASSERT_EQ(back.mode, sr::LibraryMode::aligned);
  for (std::size_t t = 0; t < 2; ++t) {
    const auto& a = back.layers[0].aligned[t];
    const auto& b = lib.layers[0].aligned[t];
    expect_float32_equal(a.b_star, b.b_star);
    expect_float32_equal(a.a_star, b.a_star);
    ASSERT_EQ(a.singular_values.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(a.singular_values[i], static_cast<double>(static_cast<float>(b.singular_values[i])));
    }
  }
}

TEST(Bundle, MixedRanksRoundTrip) {
  auto lib = fixture::random_library(1, 2, 6, 5, 2, 3);
  lib.layers[0].raw[1] = fixture::random_lora(6, 5, 4, 4, "e1", "l0");
  const auto back = sr::decode_bundle(sr::encode_bundle(lib));
  EXPECT_EQ(back.layers[0].raw[0].rank(), 2u);
  EXPECT_EQ(back.layers[0].raw[1].rank(), 4u);
}

TEST(Bundle, LayoutIsLittleEndianWithSortedCompactHeader) {
  const auto lib = fixture::random_library(1, 1, 2, 2, 1, 5);
  const Bytes b = sr::encode_bundle(lib);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "SALB");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 0);
  EXPECT_EQ(b[7], 0);
  const auto header = nlohmann::json::parse(header_text(b));
  EXPECT_EQ(header.dump(), header_text(b));  // compact, keys sorted
  EXPECT_EQ(header.at("dtype"), "float32-le");
  EXPECT_EQ(header.at("mode"), "raw");
  EXPECT_EQ(header.at("tensor_count"), 2);
  EXPECT_EQ(header.at("payload_bytes"), 16);  // B is 2x1, A is 1x2
  const std::size_t payload = 16 + read_u64(b, 8);
  ASSERT_EQ(b.size(), payload + 16);
  float first = 0.0f;
  std::memcpy(&first, b.data() + payload, 4);  // test host is little-endian
  EXPECT_EQ(first, static_cast<float>(lib.layers[0].raw[0].b(0, 0)));
}

TEST(Bundle, InvalidLibraryIsNotEncoded) {
  auto lib = fixture::random_library(1, 2, 4, 4, 2, 6);
  lib.layers[0].raw[0].b(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sr::encode_bundle(lib), sr::ValidationError);
}

TEST(Bundle, CorruptedMagic) {
  Bytes b = sr::encode_bundle(fixture::random_library(1, 2, 4, 4, 2, 7));
  b[1] = 'X';
  EXPECT_THROW(sr::decode_bundle(b), sr::MagicError);
  EXPECT_THROW(sr::decode_bundle(Bytes{'N', 'O'}), sr::MagicError);
}

TEST(Bundle, TruncationAtEveryRegion) {
  const Bytes b = sr::encode_bundle(fixture::random_library(1, 2, 4, 4, 2, 8));
  const std::size_t header_end = 16 + read_u64(b, 8);
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{10}, std::size_t{20},
                          header_end - 1, header_end, b.size() - 1}) {
    const Bytes cut(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(len));
    EXPECT_THROW(sr::decode_bundle(cut), sr::TruncatedError) << "length " << len;
  }
}

TEST(Bundle, VersionMismatch) {
  Bytes b = sr::encode_bundle(sr::AdapterLibrary{});
  b[4] = 2;
  EXPECT_THROW(sr::decode_bundle(b), sr::VersionError);
}

TEST(Bundle, TrailingBytesRejected) {
  Bytes b = sr::encode_bundle(fixture::random_library(1, 1, 2, 2, 1, 9));
  b.push_back(0);
  EXPECT_THROW(sr::decode_bundle(b), sr::MetadataError);
}

TEST(Bundle, MetadataContradictions) {
  const Bytes b = sr::encode_bundle(fixture::random_library(1, 2, 4, 3, 2, 10));
  const auto header = nlohmann::json::parse(header_text(b));

  EXPECT_THROW(sr::decode_bundle(with_header(b, "{not json")), sr::MetadataError);

  auto h = header;
  h["tensor_count"] = 5;
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  h = header;
  h["layers"][0]["experts"][0]["tensors"][0]["rows"] = 5;
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  h = header;
  h["layers"][0]["experts"][1]["expert_id"] = "zz";
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  h = header;
  h["mode"] = "sideways";
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  h = header;
  h.erase("dtype");
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  h = header;
  h["layers"][0]["experts"][0]["tensors"][1]["offset"] = 0;
  EXPECT_THROW(sr::decode_bundle(with_header(b, h.dump())), sr::MetadataError);

  // sanity: untouched header still decodes through the helper
  EXPECT_NO_THROW(sr::decode_bundle(with_header(b, header.dump())));
}

TEST(Bundle, ParseErrorsShareBaseClass) {
  Bytes b = sr::encode_bundle(sr::AdapterLibrary{});
  b[0] = 0;
  EXPECT_THROW(sr::decode_bundle(b), sr::ParseError);
}

TEST_F(TempDir, SaveLoadAndHeaderOnlyRead) {
  const auto lib = fixture::random_library(3, 9, 8, 6, 2, 11);
  const fs::path p = dir_ / "lib.salb";
  sr::save_bundle(lib, p);
  const auto back = sr::load_bundle(p);
  EXPECT_EQ(sr::encode_bundle(back), sr::encode_bundle(lib));

  const auto h = sr::read_bundle_header(p);
  EXPECT_EQ(h.layer_count, 3u);
  EXPECT_EQ(h.experts_per_layer, 9u);
  EXPECT_EQ(h.tensor_count, 3u * 9u * 2u);
  EXPECT_EQ(h.payload_bytes, 3u * 9u * (8u * 2u + 2u * 6u) * 4u);
  EXPECT_EQ(16 + h.header_bytes + h.payload_bytes, fs::file_size(p));
}

TEST_F(TempDir, HeaderReadDetectsShortPayload) {
  const fs::path p = dir_ / "lib.salb";
  sr::save_bundle(fixture::random_library(1, 2, 4, 4, 2, 12), p);
  fs::resize_file(p, fs::file_size(p) - 4);
  EXPECT_THROW(sr::read_bundle_header(p), sr::TruncatedError);
  EXPECT_THROW(sr::load_bundle(p), sr::TruncatedError);
}

TEST_F(TempDir, MissingFileIsIoError) {
  EXPECT_THROW(sr::load_bundle(dir_ / "nope.salb"), sr::IoError);
  EXPECT_THROW(sr::read_bundle_header(dir_ / "nope.salb"), sr::IoError);
}
