// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "sr/tensor.hpp"

namespace sr {

struct QrFactors {
  Matrix q;  // m x n, orthonormal columns
  Matrix r;  // n x n, upper triangular, non-negative diagonal
};

// Thin Householder QR of an m x n matrix with m >= n. A zero direction yields a
// zero diagonal entry in R; the matching column of Q is still a unit vector
// orthogonal to the others.
QrFactors thin_qr(const Matrix& m);

// Rank-p SVD, p = min(rows, cols): input == u * diag(s) * v^T.
//
// Conventions shared by every routine below:
//  - s is non-increasing; equal values keep their original column order.
//  - the largest-magnitude entry of each v column is non-negative (first one on
//    ties) and u is flipped to match.
struct SvdFactors {
  Matrix u;               // rows x p
  std::vector<double> s;  // p values
  Matrix v;               // cols x p

  std::size_t rank() const noexcept { return s.size(); }
  Matrix reconstruct() const;
};

inline constexpr std::size_t kSvdSmallMaxDim = 64;
inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 60;

// One-sided cyclic Jacobi SVD for cores up to kSvdSmallMaxDim on each side.
// Throws ValidationError on non-finite input and ShapeError past the size limit.
SvdFactors svd_small(const Matrix& m);

// Same algorithm without the size limit.
SvdFactors svd_dense(const Matrix& m);

// SVD of the product b * a (b: d_out x r, a: r x d_in, r <= min(d_out, d_in))
// computed from thin QR factors of b and a^T and an r x r core, never forming
// the d_out x d_in product.
SvdFactors svd_lowrank(const Matrix& b, const Matrix& a);

// Applies the sign convention above in place.
void canonicalize_signs(Matrix& u, Matrix& v);

}  // namespace sr
