// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/random.hpp"

#include "sr/errors.hpp"
#include "sr/linalg.hpp"

namespace sr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view component, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ fnv1a(component)) + index);
}

Vector gaussian_vector(std::size_t dim, Rng& rng, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  Vector v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng, double sigma) {
  std::normal_distribution<double> normal(0.0, sigma);
  Matrix m(rows, cols);
  for (double& x : m.values()) x = normal(rng);
  return m;
}

Vector random_unit_vector(std::size_t dim, Rng& rng) {
  if (dim == 0) throw ShapeError("random_unit_vector: dim must be >= 1");
  for (;;) {
    Vector v = gaussian_vector(dim, rng);
    const double n = norm2(v);
    if (n == 0.0) continue;
    for (double& x : v) x /= n;
    return v;
  }
}

Vector random_unit_vector(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unit_vector(dim, rng);
}

Matrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows < cols) throw ShapeError("random_orthonormal needs rows >= cols");
  return thin_qr(gaussian_matrix(rows, cols, rng)).q;
}

}  // namespace sr
