// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Seeded randomness. Every consumer derives its own stream from a root seed and
// a (component, index) name, so results never depend on scheduling order.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "sr/tensor.hpp"

namespace sr {

using Rng = std::mt19937_64;

std::uint64_t derive_seed(std::uint64_t seed, std::string_view component, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view component, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, component, index));
}

Vector gaussian_vector(std::size_t dim, Rng& rng, double sigma = 1.0);
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double sigma = 1.0);

// Gaussian sample normalized to unit length; throws ShapeError for dim == 0.
Vector random_unit_vector(std::size_t dim, Rng& rng);
Vector random_unit_vector(std::size_t dim, std::uint64_t seed);

// rows x cols matrix with orthonormal columns, Haar-distributed up to the QR
// sign convention. Requires rows >= cols.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace sr
