#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "resolvlab/errors.hpp"

namespace resolvlab::numlin {

using cxd = std::complex<double>;

/// Dense complex matrix, row-major. Entries are validated to be finite on
/// construction from raw data; arithmetic on finite inputs keeps them finite
/// at the magnitudes this library works at.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cxd(0.0, 0.0)) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  static DenseMatrix diagonal(std::span<const cxd> d);
  static DenseMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<cxd> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  cxd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cxd> data() const noexcept { return data_; }
  std::span<cxd> data() noexcept { return data_; }
  const cxd* row(std::size_t i) const { return data_.data() + i * cols_; }
  cxd* row(std::size_t i) { return data_.data() + i * cols_; }

  DenseMatrix adjoint() const;    // conjugate transpose
  DenseMatrix transpose() const;
  DenseMatrix conj() const;

  bool all_finite() const noexcept;
  bool is_hermitian(double rel_tol) const;   // ||M - M^H||_F <= tol * max(1, ||M||_F)

  double frobenius() const;
  double max_abs() const;

  /// M(i, :) *= s[i]  (left multiplication by a real diagonal)
  void scale_rows(std::span<const double> s);
  /// M(:, j) *= s[j]  (right multiplication by a real diagonal)
  void scale_cols(std::span<const double> s);
  void scale_cols_complex(std::span<const cxd> s);

  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator-=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(cxd s);

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(cxd s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cxd> data_;
};

std::vector<cxd> apply(const DenseMatrix& m, std::span<const cxd> v);

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending,
/// `vectors` columns orthonormal (Euclidean inner product unless the caller
/// re-scales them for a weighted one).
struct EigenDecomp {
  std::vector<double> values;
  DenseMatrix vectors;   // empty when computed values-only
};

/// Hermitian eigensolver: Householder tridiagonalization followed by
/// implicit-shift QL. Real-symmetric inputs take a real-arithmetic path.
EigenDecomp eigh(const DenseMatrix& m, bool want_vectors = true);

/// Largest singular value, computed from the Gram matrix of the smaller side.
double op_norm_euclid(const DenseMatrix& m);

/// Solves M X = B by partially pivoted LU. Pivot tolerance 1e-13 * max|M|.
DenseMatrix solve(const DenseMatrix& m, const DenseMatrix& b);

/// Lower-triangular L with L L^H = M for Hermitian positive-definite M.
DenseMatrix cholesky(const DenseMatrix& m);

/// Solves L X = B (L lower triangular).
DenseMatrix forward_subst(const DenseMatrix& l, const DenseMatrix& b);
/// Solves L^H X = B (L lower triangular).
DenseMatrix adjoint_back_subst(const DenseMatrix& l, const DenseMatrix& b);

}  // namespace resolvlab::numlin
