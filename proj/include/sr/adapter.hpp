// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// LoRA adapter libraries. An adapter's update to a layer is the product B * A
// (any LoRA scaling factor is already folded into B). Spectral alignment
// rewrites each adapter as (U, diag(S) V^T) from the SVD of that product, so
// rows of A* are the scaled right singular vectors and B* is orthonormal.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sr/tensor.hpp"

namespace sr {

struct LoraAdapter {
  std::string expert_id;
  std::string layer_id;
  Matrix b;  // d_out x r
  Matrix a;  // r x d_in

  std::size_t rank() const noexcept { return b.cols(); }
  std::size_t d_in() const noexcept { return a.cols(); }
  std::size_t d_out() const noexcept { return b.rows(); }
  Matrix product() const { return matmul(b, a); }
};

struct AlignedAdapter {
  std::string expert_id;
  std::string layer_id;
  Matrix b_star;                         // d_out x r, orthonormal columns
  Matrix a_star;                         // r x d_in, row i = s_i * v_i^T
  std::vector<double> singular_values;  // r values, non-increasing

  std::size_t rank() const noexcept { return b_star.cols(); }
  std::size_t d_in() const noexcept { return a_star.cols(); }
  std::size_t d_out() const noexcept { return b_star.rows(); }
  Matrix product() const { return matmul(b_star, a_star); }
};

enum class LibraryMode { raw, aligned };

const char* to_string(LibraryMode mode) noexcept;

// One layer's experts. Exactly one of `raw` / `aligned` is populated, matching
// the owning library's mode. Position t is expert t in every layer.
struct LibraryLayer {
  std::string layer_id;
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<LoraAdapter> raw;
  std::vector<AlignedAdapter> aligned;

  std::size_t expert_count(LibraryMode mode) const noexcept {
    return mode == LibraryMode::raw ? raw.size() : aligned.size();
  }
  std::string expert_id(LibraryMode mode, std::size_t t) const {
    return mode == LibraryMode::raw ? raw.at(t).expert_id : aligned.at(t).expert_id;
  }
};

// Plain aggregate so that malformed libraries can be built and reported on;
// operations that need a valid library run validate_library first.
struct AdapterLibrary {
  LibraryMode mode = LibraryMode::raw;
  std::vector<LibraryLayer> layers;

  std::size_t expert_count() const noexcept {
    return layers.empty() ? 0 : layers.front().expert_count(mode);
  }
  std::vector<std::string> expert_ids() const;
};

enum class ViolationKind {
  dimension_mismatch,
  expert_count_mismatch,
  ordering_mismatch,
  duplicate_id,
  non_finite,
  mode_mismatch,
  spectrum_invalid,
};

const char* to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string layer_id;
  std::string expert_id;  // empty for layer-level violations
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate_library(const AdapterLibrary& lib);

// Throws ValidationError on non-finite parameters, ShapeError on bad shapes.
AlignedAdapter align(const LoraAdapter& adapter);

// Aligns every adapter (in parallel when threads != 1). Requires a valid raw
// library; errors carry the layer and expert ids.
AdapterLibrary align_library(const AdapterLibrary& lib, std::size_t threads = 1);

// The layer update B * A of expert t in layer l, whatever the mode.
Matrix expert_product(const AdapterLibrary& lib, std::size_t layer, std::size_t t);

}  // namespace sr
