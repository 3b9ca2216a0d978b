// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sr/errors.hpp"

namespace sr {

namespace {

// Column-major scratch copy; Jacobi and Householder both sweep columns.
using Columns = std::vector<std::vector<double>>;

Columns to_columns(const Matrix& m) {
  Columns cols(m.cols(), std::vector<double>(m.rows()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) cols[j][i] = m(i, j);
  return cols;
}

double col_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Unit vector orthogonal to every column of `basis` (which must be orthonormal
// and hold fewer than `dim` columns). Candidates are standard basis vectors,
// orthogonalized twice; the one with the largest residual wins.
std::vector<double> orthonormal_completion(const Columns& basis, std::size_t dim) {
  std::vector<double> best;
  double best_norm = -1.0;
  for (std::size_t e = 0; e < dim; ++e) {
    std::vector<double> cand(dim, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double proj = col_dot(q, cand);
        for (std::size_t i = 0; i < dim; ++i) cand[i] -= proj * q[i];
      }
    }
    const double n = std::sqrt(col_dot(cand, cand));
    if (n > best_norm) {
      best_norm = n;
      best = std::move(cand);
      if (best_norm > 0.7) break;  // any residual this large is well conditioned
    }
  }
  for (double& x : best) x /= best_norm;
  return best;
}

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) throw ValidationError(std::string(op) + ": non-finite input");
}

SvdFactors jacobi_svd_tall(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  Columns w = to_columns(m);
  Columns v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = col_dot(w[p], w[p]);
        const double beta = col_dot(w[q], w[q]);
        const double gamma = col_dot(w[p], w[q]);
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double wp = w[p][i];
          const double wq = w[q][i];
          w[p][i] = c * wp - s * wq;
          w[q][i] = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v[p][i];
          const double vq = v[q][i];
          v[p][i] = c * vp - s * vq;
          v[q][i] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(col_dot(w[j], w[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  const double smax = n == 0 ? 0.0 : sigma[order.front()];
  const double null_threshold = smax * 1e-13;

  SvdFactors out{Matrix(rows, n), std::vector<double>(n), Matrix(n, n)};
  Columns accepted;
  std::vector<std::size_t> deferred;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.s[k] = sigma[j];
    out.v.set_column(k, v[j]);
    if (sigma[j] > null_threshold && sigma[j] > 0.0) {
      std::vector<double> u = w[j];
      for (double& x : u) x /= sigma[j];
      out.u.set_column(k, u);
      accepted.push_back(std::move(u));
    } else {
      deferred.push_back(k);
    }
  }
  for (std::size_t k : deferred) {
    auto u = orthonormal_completion(accepted, rows);
    out.u.set_column(k, u);
    accepted.push_back(std::move(u));
  }
  canonicalize_signs(out.u, out.v);
  return out;
}

}  // namespace

Matrix SvdFactors::reconstruct() const {
  Matrix us = u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t k = 0; k < s.size(); ++k) us(i, k) *= s[k];
  return matmul_nt(us, v);
}

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (std::size_t k = 0; k < v.cols(); ++k) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, k)) > best) {
        best = std::abs(v(i, k));
        arg = i;
      }
    }
    if (v.rows() > 0 && v(arg, k) < 0.0) {
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, k) = -v(i, k);
      for (std::size_t i = 0; i < u.rows(); ++i) u(i, k) = -u(i, k);
    }
  }
}

QrFactors thin_qr(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t n = m.cols();
  if (rows < n) {
    throw ShapeError("thin_qr needs rows >= cols, got " + std::to_string(rows) + "x" +
                     std::to_string(n));
  }
  Columns a = to_columns(m);
  // Householder vectors, stored over rows [j, rows).
  Columns reflectors(n);

  for (std::size_t j = 0; j < n; ++j) {
    double alpha_sq = 0.0;
    for (std::size_t i = j; i < rows; ++i) alpha_sq += a[j][i] * a[j][i];
    const double alpha = std::sqrt(alpha_sq);
    if (alpha == 0.0) continue;

    std::vector<double> hv(a[j].begin() + static_cast<std::ptrdiff_t>(j), a[j].end());
    const double sign = hv[0] >= 0.0 ? 1.0 : -1.0;
    hv[0] += sign * alpha;
    const double hv_sq = col_dot(hv, hv);
    if (hv_sq == 0.0) continue;

    for (std::size_t c = j; c < n; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < rows; ++i) proj += hv[i - j] * a[c][i];
      const double f = 2.0 * proj / hv_sq;
      for (std::size_t i = j; i < rows; ++i) a[c][i] -= f * hv[i - j];
    }
    for (std::size_t i = j + 1; i < rows; ++i) a[j][i] = 0.0;
    a[j][j] = -sign * alpha;
    for (double& x : hv) x /= std::sqrt(hv_sq);
    reflectors[j] = std::move(hv);
  }

  QrFactors out{Matrix(rows, n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = a[j][i];

  // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of the identity.
  Columns q(n, std::vector<double>(rows, 0.0));
  for (std::size_t c = 0; c < n; ++c) q[c][c] = 1.0;
  for (std::size_t jj = n; jj-- > 0;) {
    const auto& hv = reflectors[jj];
    if (hv.empty()) continue;
    for (std::size_t c = 0; c < n; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < rows; ++i) proj += hv[i - jj] * q[c][i];
      if (proj == 0.0) continue;
      for (std::size_t i = jj; i < rows; ++i) q[c][i] -= 2.0 * proj * hv[i - jj];
    }
  }
  for (std::size_t c = 0; c < n; ++c) out.q.set_column(c, q[c]);

  for (std::size_t i = 0; i < n; ++i) {
    if (out.r(i, i) < 0.0) {
      for (std::size_t j = i; j < n; ++j) out.r(i, j) = -out.r(i, j);
      for (std::size_t k = 0; k < rows; ++k) out.q(k, i) = -out.q(k, i);
    }
  }
  return out;
}

SvdFactors svd_dense(const Matrix& m) {
  require_finite(m, "svd");
  if (m.rows() >= m.cols()) return jacobi_svd_tall(m);
  SvdFactors t = jacobi_svd_tall(m.transpose());
  SvdFactors out{std::move(t.v), std::move(t.s), std::move(t.u)};
  canonicalize_signs(out.u, out.v);
  return out;
}

SvdFactors svd_small(const Matrix& m) {
  if (m.rows() > kSvdSmallMaxDim || m.cols() > kSvdSmallMaxDim) {
    throw ShapeError("svd_small is limited to " + std::to_string(kSvdSmallMaxDim) +
                     " rows and columns, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  return svd_dense(m);
}

SvdFactors svd_lowrank(const Matrix& b, const Matrix& a) {
  if (b.cols() != a.rows()) {
    throw ShapeError("svd_lowrank: inner dimensions differ (" + std::to_string(b.cols()) +
                     " vs " + std::to_string(a.rows()) + ")");
  }
  const std::size_t r = b.cols();
  if (r == 0 || r > b.rows() || r > a.cols()) {
    throw ShapeError("svd_lowrank: rank " + std::to_string(r) + " exceeds factor dimensions");
  }
  require_finite(b, "svd_lowrank");
  require_finite(a, "svd_lowrank");

  QrFactors qb = thin_qr(b);
  QrFactors qa = thin_qr(a.transpose());
  // b a = Qb (Rb Ra^T) Qa^T
  Matrix core = matmul_nt(qb.r, qa.r);
  SvdFactors c = svd_dense(core);

  SvdFactors out{matmul(qb.q, c.u), std::move(c.s), matmul(qa.q, c.v)};
  canonicalize_signs(out.u, out.v);
  return out;
}

}  // namespace sr
