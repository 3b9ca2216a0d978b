// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Small builders shared by the tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sr/adapter.hpp"
#include "sr/random.hpp"
#include "sr/tensor.hpp"

namespace fixture {

inline sr::LoraAdapter random_lora(std::size_t d_out, std::size_t d_in, std::size_t r,
                                   std::uint64_t seed, const std::string& expert = "e",
                                   const std::string& layer = "l0") {
  sr::Rng rng(seed);
  return {expert, layer, sr::gaussian_matrix(d_out, r, rng), sr::gaussian_matrix(r, d_in, rng)};
}

// T experts per layer, expert ids e0..e{T-1}, layer ids l0..
inline sr::AdapterLibrary random_library(std::size_t layers, std::size_t experts, std::size_t d_out,
                                         std::size_t d_in, std::size_t r, std::uint64_t seed) {
  sr::AdapterLibrary lib;
  lib.mode = sr::LibraryMode::raw;
  for (std::size_t l = 0; l < layers; ++l) {
    sr::LibraryLayer layer;
    layer.layer_id = "l" + std::to_string(l);
    layer.d_in = d_in;
    layer.d_out = d_out;
    for (std::size_t t = 0; t < experts; ++t) {
      layer.raw.push_back(random_lora(d_out, d_in, r, seed * 1000003u + l * 101u + t,
                                      "e" + std::to_string(t), layer.layer_id));
    }
    lib.layers.push_back(std::move(layer));
  }
  return lib;
}

inline sr::Vector random_vector(std::size_t dim, std::uint64_t seed) {
  sr::Rng rng(seed);
  return sr::gaussian_vector(dim, rng);
}

// max |M^T M - I|
inline double orthonormality_error(const sr::Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m.rows(); ++k) s += m(k, i) * m(k, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace fixture
