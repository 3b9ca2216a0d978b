// Copyright (c) 2026, the spectral-router developers
// SPDX-License-Identifier: Apache-2.0
//
// Dense real vectors and row-major matrices. All arithmetic is double precision;
// the bundle format narrows to 32-bit only on disk.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace sr {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  explicit Vector(std::vector<double> data) : data_(std::move(data)) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  std::size_t dim() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& raw() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws ShapeError when data.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> v);
  Vector row_vector(std::size_t i) const;

  Matrix transpose() const;
  // Columns [first, first + count).
  Matrix column_block(std::size_t first, std::size_t count) const;

  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T * b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Vector matvec_transposed(const Matrix& a, const Vector& x);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix& operator+=(Matrix& a, const Matrix& b);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);
Vector& operator+=(Vector& a, const Vector& b);

double dot(std::span<const double> a, std::span<const double> b);
double dot(const Vector& a, const Vector& b);
double norm2(std::span<const double> a);
double norm2(const Vector& a);
double frobenius_norm(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const Vector& a, const Vector& b);
// ||a - b||_F / max(||b||_F, tiny)
double relative_frobenius_error(const Matrix& a, const Matrix& b);

// Throws UndefinedSimilarityError for a zero vector, ShapeError on length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(const Vector& a, const Vector& b);

}  // namespace sr
