// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/adapter.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "sr/errors.hpp"
#include "sr/linalg.hpp"
#include "sr/parallel.hpp"

namespace sr {

const char* to_string(LibraryMode mode) noexcept {
  return mode == LibraryMode::raw ? "raw" : "aligned";
}

const char* to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::dimension_mismatch: return "dimension_mismatch";
    case ViolationKind::expert_count_mismatch: return "expert_count_mismatch";
    case ViolationKind::ordering_mismatch: return "ordering_mismatch";
    case ViolationKind::duplicate_id: return "duplicate_id";
    case ViolationKind::non_finite: return "non_finite";
    case ViolationKind::mode_mismatch: return "mode_mismatch";
    case ViolationKind::spectrum_invalid: return "spectrum_invalid";
  }
  return "unknown";
}

std::vector<std::string> AdapterLibrary::expert_ids() const {
  std::vector<std::string> ids;
  if (layers.empty()) return ids;
  const auto& first = layers.front();
  for (std::size_t t = 0; t < first.expert_count(mode); ++t) ids.push_back(first.expert_id(mode, t));
  return ids;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << sr::to_string(v.kind) << ": layer '" << v.layer_id << "'";
    if (!v.expert_id.empty()) os << " expert '" << v.expert_id << "'";
    os << ": " << v.message << "\n";
  }
  return os.str();
}

namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

struct Checker {
  ValidationReport& report;
  const LibraryLayer& layer;

  void add(ViolationKind kind, const std::string& expert, std::string message) {
    report.violations.push_back({kind, layer.layer_id, expert, std::move(message)});
  }

  void check_factors(const std::string& expert, const std::string& adapter_layer,
                     const Matrix& b, const Matrix& a) {
    if (adapter_layer != layer.layer_id) {
      add(ViolationKind::dimension_mismatch, expert,
          "adapter tagged with layer '" + adapter_layer + "'");
    }
    const std::size_t r = b.cols();
    if (r == 0) add(ViolationKind::dimension_mismatch, expert, "rank must be >= 1");
    if (a.rows() != r) {
      add(ViolationKind::dimension_mismatch, expert,
          "B is " + shape(b) + " but A is " + shape(a));
    }
    if (b.rows() != layer.d_out) {
      add(ViolationKind::dimension_mismatch, expert,
          "B has " + std::to_string(b.rows()) + " rows, layer d_out is " +
              std::to_string(layer.d_out));
    }
    if (a.cols() != layer.d_in) {
      add(ViolationKind::dimension_mismatch, expert,
          "A has " + std::to_string(a.cols()) + " columns, layer d_in is " +
              std::to_string(layer.d_in));
    }
    if (!b.all_finite()) add(ViolationKind::non_finite, expert, "B has non-finite entries");
    if (!a.all_finite()) add(ViolationKind::non_finite, expert, "A has non-finite entries");
  }
};

}  // namespace

ValidationReport validate_library(const AdapterLibrary& lib) {
  ValidationReport report;
  const auto reference = lib.expert_ids();
  std::set<std::string> layer_ids;

  for (const auto& layer : lib.layers) {
    Checker check{report, layer};
    if (!layer_ids.insert(layer.layer_id).second) {
      check.add(ViolationKind::duplicate_id, "", "layer id appears more than once");
    }
    if (layer.d_in == 0 || layer.d_out == 0) {
      check.add(ViolationKind::dimension_mismatch, "", "layer dimensions must be positive");
    }
    const bool wrong_vector_used =
        lib.mode == LibraryMode::raw ? !layer.aligned.empty() : !layer.raw.empty();
    if (wrong_vector_used) {
      check.add(ViolationKind::mode_mismatch, "",
                std::string("library is ") + to_string(lib.mode) +
                    " but the layer holds adapters of the other mode");
    }

    const std::size_t count = layer.expert_count(lib.mode);
    if (count != reference.size()) {
      check.add(ViolationKind::expert_count_mismatch, "",
                "holds " + std::to_string(count) + " experts, expected " +
                    std::to_string(reference.size()));
    }
    std::set<std::string> seen;
    for (std::size_t t = 0; t < count; ++t) {
      const std::string id = layer.expert_id(lib.mode, t);
      if (!seen.insert(id).second) {
        check.add(ViolationKind::duplicate_id, id, "expert id appears more than once");
      }
      if (t < reference.size() && id != reference[t]) {
        check.add(ViolationKind::ordering_mismatch, id,
                  "position " + std::to_string(t) + " holds '" + id + "', expected '" +
                      reference[t] + "'");
      }
    }

    if (lib.mode == LibraryMode::raw) {
      for (const auto& ad : layer.raw) check.check_factors(ad.expert_id, ad.layer_id, ad.b, ad.a);
    } else {
      for (const auto& ad : layer.aligned) {
        check.check_factors(ad.expert_id, ad.layer_id, ad.b_star, ad.a_star);
        const auto& s = ad.singular_values;
        bool spectrum_ok = s.size() == ad.rank();
        for (std::size_t i = 0; spectrum_ok && i < s.size(); ++i) {
          spectrum_ok = std::isfinite(s[i]) && s[i] >= 0.0 && (i == 0 || s[i] <= s[i - 1]);
        }
        if (!spectrum_ok) {
          check.add(ViolationKind::spectrum_invalid, ad.expert_id,
                    "singular values must be r finite non-negative non-increasing values");
        }
      }
    }
  }
  return report;
}

AlignedAdapter align(const LoraAdapter& adapter) {
  if (!adapter.b.all_finite() || !adapter.a.all_finite()) {
    throw ValidationError("adapter '" + adapter.expert_id + "' in layer '" + adapter.layer_id +
                          "' has non-finite parameters");
  }
  SvdFactors f = svd_lowrank(adapter.b, adapter.a);
  Matrix a_star = f.v.transpose();
  for (std::size_t i = 0; i < a_star.rows(); ++i)
    for (double& x : a_star.row(i)) x *= f.s[i];
  return AlignedAdapter{adapter.expert_id, adapter.layer_id, std::move(f.u), std::move(a_star),
                        std::move(f.s)};
}

AdapterLibrary align_library(const AdapterLibrary& lib, std::size_t threads) {
  if (lib.mode != LibraryMode::raw) {
    throw ValidationError("align_library: library is already aligned");
  }
  const auto report = validate_library(lib);
  if (!report.ok()) throw ValidationError("align_library: invalid library\n" + report.to_string());

  AdapterLibrary out;
  out.mode = LibraryMode::aligned;
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t l = 0; l < lib.layers.size(); ++l) {
    const auto& src = lib.layers[l];
    out.layers.push_back({src.layer_id, src.d_in, src.d_out, {}, {}});
    out.layers.back().aligned.resize(src.raw.size());
    for (std::size_t t = 0; t < src.raw.size(); ++t) jobs.emplace_back(l, t);
  }
  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto [l, t] = jobs[j];
    const auto& ad = lib.layers[l].raw[t];
    try {
      out.layers[l].aligned[t] = align(ad);
    } catch (const Error& e) {
      throw ValidationError("layer '" + ad.layer_id + "' expert '" + ad.expert_id +
                            "': " + e.what());
    }
  });
  return out;
}

Matrix expert_product(const AdapterLibrary& lib, std::size_t layer, std::size_t t) {
  const auto& l = lib.layers.at(layer);
  return lib.mode == LibraryMode::raw ? l.raw.at(t).product() : l.aligned.at(t).product();
}

}  // namespace sr
