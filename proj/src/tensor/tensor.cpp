// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0

#include "sr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sr/errors.hpp"

namespace sr {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool finite_span(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

bool Vector::all_finite() const noexcept { return finite_span(data_); }

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Matrix::set_column(std::size_t j, std::span<const double> v) {
  if (v.size() != rows_) throw ShapeError("column length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Vector Matrix::row_vector(std::size_t i) const {
  auto r = row(i);
  return Vector(std::vector<double>(r.begin(), r.end()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::column_block(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw ShapeError("column block out of range");
  Matrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

bool Matrix::all_finite() const noexcept { return finite_span(data_); }

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a) + " times " + dims(b));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + dims(a) + " times transpose of " + dims(b));
  }
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(a.row(i), b.row(j));
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: transpose of " + dims(a) + " times " + dims(b));
  }
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.dim()) {
    throw ShapeError("matvec: " + dims(a) + " times vector of dim " + std::to_string(x.dim()));
  }
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x.values());
  return y;
}

Vector matvec_transposed(const Matrix& a, const Vector& x) {
  if (a.rows() != x.dim()) {
    throw ShapeError("matvec_transposed: " + dims(a) + " with vector of dim " +
                     std::to_string(x.dim()));
  }
  Vector y(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    auto arow = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * arow[j];
  }
  return y;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix c = a;
  c += b;
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("subtract: " + dims(a) + " vs " + dims(b));
  }
  Matrix c = a;
  auto cv = c.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= bv[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.values()) v *= s;
  return c;
}

Matrix& operator+=(Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("add: " + dims(a) + " vs " + dims(b));
  }
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) av[i] += bv[i];
  return a;
}

Vector operator+(const Vector& a, const Vector& b) {
  Vector c = a;
  c += b;
  return c;
}

Vector operator-(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector subtract: dimension mismatch");
  Vector c = a;
  for (std::size_t i = 0; i < c.dim(); ++i) c[i] -= b[i];
  return c;
}

Vector operator*(double s, const Vector& a) {
  Vector c = a;
  for (double& v : c) v *= s;
  return c;
}

Vector& operator+=(Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("vector add: dimension mismatch");
  for (std::size_t i = 0; i < a.dim(); ++i) a[i] += b[i];
  return a;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const Vector& a, const Vector& b) { return dot(a.values(), b.values()); }

double norm2(std::span<const double> a) {
  // Scaled accumulation keeps tiny and huge entries from under/overflowing.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : a) {
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double norm2(const Vector& a) { return norm2(a.values()); }

double frobenius_norm(const Matrix& a) { return norm2(a.values()); }

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: " + dims(a) + " vs " + dims(b));
  }
  double m = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw ShapeError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  const double denom = std::max(frobenius_norm(b), std::numeric_limits<double>::min());
  return frobenius_norm(a - b) / denom;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine: length mismatch");
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw UndefinedSimilarityError("cosine of a zero vector");
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double cosine(const Vector& a, const Vector& b) { return cosine(a.values(), b.values()); }

}  // namespace sr
