// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "sr/errors.hpp"

namespace sr {

namespace {

using json = nlohmann::json;

constexpr const char* kDtype = "float32-le";

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void put_tensor(std::vector<std::uint8_t>& payload, std::span<const double> values) {
  for (double x : values) put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
}

struct TensorRef {
  std::string name;
  std::size_t rows;
  std::size_t cols;
};

json tensor_entry(const TensorRef& t, std::uint64_t& offset) {
  json j = {{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", offset}};
  offset += static_cast<std::uint64_t>(t.rows) * t.cols * sizeof(float);
  return j;
}

struct Preamble {
  std::uint64_t header_bytes;
};

// Validates magic, version and that the declared header fits in `available`.
Preamble check_preamble(std::span<const std::uint8_t> bytes, std::uint64_t available) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (std::memcmp(bytes.data(), kBundleMagic, magic_len) != 0) {
    throw MagicError("not a SALB bundle: bad magic bytes");
  }
  if (bytes.size() < kBundlePreambleBytes) {
    throw TruncatedError("truncated SALB preamble: " + std::to_string(bytes.size()) + " bytes");
  }
  const std::uint32_t version = get_u32(bytes.data() + 4);
  if (version != kBundleVersion) {
    throw VersionError("unsupported SALB version " + std::to_string(version));
  }
  const std::uint64_t header_bytes = get_u64(bytes.data() + 8);
  if (header_bytes > available - kBundlePreambleBytes) {
    throw TruncatedError("truncated SALB header: declares " + std::to_string(header_bytes) +
                         " bytes, " + std::to_string(available - kBundlePreambleBytes) +
                         " available");
  }
  return {header_bytes};
}

json parse_header(std::span<const std::uint8_t> text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw MetadataError(std::string("SALB header is not valid JSON: ") + e.what());
  }
}

struct HeaderSummary {
  std::uint64_t payload_bytes = 0;
  std::size_t tensor_count = 0;
  std::size_t layer_count = 0;
  std::size_t experts_per_layer = 0;
};

template <typename T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw MetadataError(std::string("SALB header field '") + key + "': " + e.what());
  }
}

void check_tensor(const json& t, const std::string& name, std::size_t rows, std::size_t cols,
                  std::uint64_t& offset, const std::string& where) {
  if (field<std::string>(t, "name") != name) {
    throw MetadataError(where + ": expected tensor '" + name + "'");
  }
  if (field<std::size_t>(t, "rows") != rows || field<std::size_t>(t, "cols") != cols) {
    throw MetadataError(where + ": tensor '" + name + "' shape contradicts declared dimensions");
  }
  if (field<std::uint64_t>(t, "offset") != offset) {
    throw MetadataError(where + ": tensor '" + name + "' offset is not contiguous");
  }
  offset += static_cast<std::uint64_t>(rows) * cols * sizeof(float);
}

// Cross-checks the header against itself. Returns what the payload must hold.
HeaderSummary check_header(const json& h) {
  if (!h.is_object()) throw MetadataError("SALB header must be a JSON object");
  if (field<std::string>(h, "dtype") != kDtype) throw MetadataError("unsupported dtype");
  const auto mode = field<std::string>(h, "mode");
  if (mode != "raw" && mode != "aligned") throw MetadataError("unknown mode '" + mode + "'");
  const bool aligned = mode == "aligned";
  const auto expert_ids = field<std::vector<std::string>>(h, "expert_ids");
  const json& layers = h.contains("layers") ? h.at("layers") : json();
  if (!layers.is_array()) throw MetadataError("SALB header field 'layers' must be an array");

  HeaderSummary s;
  s.layer_count = layers.size();
  s.experts_per_layer = layers.empty() ? 0 : expert_ids.size();
  std::uint64_t offset = 0;
  for (const auto& layer : layers) {
    const auto layer_id = field<std::string>(layer, "layer_id");
    const auto d_in = field<std::size_t>(layer, "d_in");
    const auto d_out = field<std::size_t>(layer, "d_out");
    const json& experts = layer.contains("experts") ? layer.at("experts") : json();
    if (!experts.is_array() || experts.size() != expert_ids.size()) {
      throw MetadataError("layer '" + layer_id + "': expert list contradicts expert_ids");
    }
    for (std::size_t t = 0; t < experts.size(); ++t) {
      const json& e = experts[t];
      const auto id = field<std::string>(e, "expert_id");
      const std::string where = "layer '" + layer_id + "' expert '" + id + "'";
      if (id != expert_ids[t]) throw MetadataError(where + ": order contradicts expert_ids");
      const auto rank = field<std::size_t>(e, "rank");
      if (rank == 0) throw MetadataError(where + ": rank must be >= 1");
      const json& tensors = e.contains("tensors") ? e.at("tensors") : json();
      const std::size_t expected = aligned ? 3 : 2;
      if (!tensors.is_array() || tensors.size() != expected) {
        throw MetadataError(where + ": expected " + std::to_string(expected) + " tensors");
      }
      check_tensor(tensors[0], aligned ? "B_star" : "B", d_out, rank, offset, where);
      check_tensor(tensors[1], aligned ? "A_star" : "A", rank, d_in, offset, where);
      if (aligned) check_tensor(tensors[2], "singular_values", 1, rank, offset, where);
      s.tensor_count += expected;
    }
  }
  s.payload_bytes = offset;
  if (field<std::uint64_t>(h, "payload_bytes") != s.payload_bytes) {
    throw MetadataError("payload_bytes contradicts tensor table");
  }
  if (field<std::size_t>(h, "tensor_count") != s.tensor_count) {
    throw MetadataError("tensor_count contradicts tensor table");
  }
  return s;
}

Matrix read_tensor(const std::uint8_t*& p, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& x : m.values()) {
    x = static_cast<double>(std::bit_cast<float>(get_u32(p)));
    p += 4;
  }
  return m;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_bundle(const AdapterLibrary& lib) {
  const auto report = validate_library(lib);
  if (!report.ok()) throw ValidationError("cannot save invalid library\n" + report.to_string());
  const bool aligned = lib.mode == LibraryMode::aligned;

  std::vector<std::uint8_t> payload;
  std::uint64_t offset = 0;
  std::size_t tensor_count = 0;
  json layers = json::array();
  for (const auto& layer : lib.layers) {
    json experts = json::array();
    for (std::size_t t = 0; t < layer.expert_count(lib.mode); ++t) {
      json tensors = json::array();
      std::size_t rank = 0;
      if (aligned) {
        const auto& ad = layer.aligned[t];
        rank = ad.rank();
        tensors.push_back(tensor_entry({"B_star", ad.b_star.rows(), ad.b_star.cols()}, offset));
        tensors.push_back(tensor_entry({"A_star", ad.a_star.rows(), ad.a_star.cols()}, offset));
        tensors.push_back(tensor_entry({"singular_values", 1, rank}, offset));
        put_tensor(payload, ad.b_star.values());
        put_tensor(payload, ad.a_star.values());
        put_tensor(payload, ad.singular_values);
        tensor_count += 3;
      } else {
        const auto& ad = layer.raw[t];
        rank = ad.rank();
        tensors.push_back(tensor_entry({"B", ad.b.rows(), ad.b.cols()}, offset));
        tensors.push_back(tensor_entry({"A", ad.a.rows(), ad.a.cols()}, offset));
        put_tensor(payload, ad.b.values());
        put_tensor(payload, ad.a.values());
        tensor_count += 2;
      }
      experts.push_back({{"expert_id", layer.expert_id(lib.mode, t)},
                         {"rank", rank},
                         {"tensors", std::move(tensors)}});
    }
    layers.push_back({{"layer_id", layer.layer_id},
                      {"d_in", layer.d_in},
                      {"d_out", layer.d_out},
                      {"experts", std::move(experts)}});
  }
  const json header = {{"dtype", kDtype},
                       {"mode", to_string(lib.mode)},
                       {"expert_ids", lib.expert_ids()},
                       {"layers", std::move(layers)},
                       {"tensor_count", tensor_count},
                       {"payload_bytes", offset}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kBundleMagic), std::end(kBundleMagic));
  put_u32(out, kBundleVersion);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

AdapterLibrary decode_bundle(std::span<const std::uint8_t> bytes) {
  const Preamble pre = check_preamble(bytes, bytes.size());
  const json h = parse_header(bytes.subspan(kBundlePreambleBytes, pre.header_bytes));
  const HeaderSummary summary = check_header(h);

  const std::uint64_t payload_start = kBundlePreambleBytes + pre.header_bytes;
  const std::uint64_t available = bytes.size() - payload_start;
  if (available < summary.payload_bytes) {
    throw TruncatedError("truncated SALB payload: " + std::to_string(available) + " of " +
                         std::to_string(summary.payload_bytes) + " bytes present");
  }
  if (available > summary.payload_bytes) {
    throw MetadataError("SALB file has " + std::to_string(available - summary.payload_bytes) +
                        " trailing bytes after the payload");
  }

  AdapterLibrary lib;
  lib.mode = h.at("mode") == "aligned" ? LibraryMode::aligned : LibraryMode::raw;
  const std::uint8_t* p = bytes.data() + payload_start;
  for (const auto& jl : h.at("layers")) {
    LibraryLayer layer;
    layer.layer_id = jl.at("layer_id").get<std::string>();
    layer.d_in = jl.at("d_in").get<std::size_t>();
    layer.d_out = jl.at("d_out").get<std::size_t>();
    for (const auto& je : jl.at("experts")) {
      const auto id = je.at("expert_id").get<std::string>();
      const auto rank = je.at("rank").get<std::size_t>();
      if (lib.mode == LibraryMode::aligned) {
        AlignedAdapter ad{id, layer.layer_id, {}, {}, {}};
        ad.b_star = read_tensor(p, layer.d_out, rank);
        ad.a_star = read_tensor(p, rank, layer.d_in);
        const Matrix s = read_tensor(p, 1, rank);
        ad.singular_values.assign(s.values().begin(), s.values().end());
        layer.aligned.push_back(std::move(ad));
      } else {
        LoraAdapter ad{id, layer.layer_id, {}, {}};
        ad.b = read_tensor(p, layer.d_out, rank);
        ad.a = read_tensor(p, rank, layer.d_in);
        layer.raw.push_back(std::move(ad));
      }
    }
    lib.layers.push_back(std::move(layer));
  }
  return lib;
}

void save_bundle(const AdapterLibrary& lib, const std::filesystem::path& path) {
  const auto bytes = encode_bundle(lib);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

AdapterLibrary load_bundle(const std::filesystem::path& path) {
  return decode_bundle(read_file(path));
}

BundleHeader read_bundle_header(const std::filesystem::path& path) {
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path.string() + "': " + ec.message());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::vector<std::uint8_t> pre(std::min<std::uintmax_t>(file_size, kBundlePreambleBytes));
  in.read(reinterpret_cast<char*>(pre.data()), static_cast<std::streamsize>(pre.size()));
  const Preamble p = check_preamble(pre, file_size);

  std::vector<std::uint8_t> text(p.header_bytes);
  in.read(reinterpret_cast<char*>(text.data()), static_cast<std::streamsize>(text.size()));
  if (!in) throw TruncatedError("truncated SALB header");

  BundleHeader out;
  out.header = parse_header(text);
  const HeaderSummary s = check_header(out.header);
  out.header_bytes = p.header_bytes;
  out.payload_bytes = s.payload_bytes;
  out.tensor_count = s.tensor_count;
  out.layer_count = s.layer_count;
  out.experts_per_layer = s.experts_per_layer;
  const std::uint64_t available = file_size - kBundlePreambleBytes - p.header_bytes;
  if (available < s.payload_bytes) {
    throw TruncatedError("truncated SALB payload: " + std::to_string(available) + " of " +
                         std::to_string(s.payload_bytes) + " bytes present");
  }
  return out;
}

}  // namespace sr
