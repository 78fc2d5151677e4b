#include "resolvlab/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace resolvlab::numlin {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxQlIterations = 64;

double hypot2(double a, double b) { return std::hypot(a, b); }

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const cxd> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::from_entries(std::size_t rows, std::size_t cols, std::vector<cxd> entries) {
  if (entries.size() != rows * cols)
    throw Error(ErrorKind::DimensionMismatch, "entry count does not match rows*cols");
  DenseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(entries);
  if (!m.all_finite())
    throw Error(ErrorKind::NonFiniteEntries, "matrix entries must be finite");
  return m;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

DenseMatrix DenseMatrix::conj() const {
  DenseMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) m.data_[i] = std::conj(data_[i]);
  return m;
}

bool DenseMatrix::all_finite() const noexcept {
  for (const cxd& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool DenseMatrix::is_hermitian(double rel_tol) const {
  if (rows_ != cols_) return false;
  double diff2 = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j) {
      cxd d = (*this)(i, j) - std::conj((*this)(j, i));
      diff2 += (i == j ? 1.0 : 2.0) * std::norm(d);
    }
  return std::sqrt(diff2) <= rel_tol * std::max(1.0, frobenius());
}

double DenseMatrix::frobenius() const {
  double s = 0.0;
  for (const cxd& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
  double s = 0.0;
  for (const cxd& z : data_) s = std::max(s, std::abs(z));
  return s;
}

void DenseMatrix::scale_rows(std::span<const double> s) {
  if (s.size() != rows_) throw Error(ErrorKind::DimensionMismatch, "scale_rows size");
  for (std::size_t i = 0; i < rows_; ++i) {
    cxd* r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) r[j] *= s[i];
  }
}

void DenseMatrix::scale_cols(std::span<const double> s) {
  if (s.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "scale_cols size");
  for (std::size_t i = 0; i < rows_; ++i) {
    cxd* r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) r[j] *= s[j];
  }
}

void DenseMatrix::scale_cols_complex(std::span<const cxd> s) {
  if (s.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "scale_cols size");
  for (std::size_t i = 0; i < rows_; ++i) {
    cxd* r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) r[j] *= s[j];
  }
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorKind::DimensionMismatch, "matrix addition shapes");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw Error(ErrorKind::DimensionMismatch, "matrix subtraction shapes");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(cxd s) {
  for (cxd& z : data_) z *= s;
  return *this;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::DimensionMismatch, "matrix product shapes");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    cxd* ci = c.row(i);
    const cxd* ai = a.row(i);
    for (std::size_t l = 0; l < k; ++l) {
      const cxd ail = ai[l];
      if (ail == cxd(0.0, 0.0)) continue;
      const cxd* bl = b.row(l);
      for (std::size_t j = 0; j < m; ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

std::vector<cxd> apply(const DenseMatrix& m, std::span<const cxd> v) {
  if (v.size() != m.cols()) throw Error(ErrorKind::DimensionMismatch, "matvec shapes");
  std::vector<cxd> out(m.rows(), cxd(0.0, 0.0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const cxd* r = m.row(i);
    cxd acc(0.0, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) acc += r[j] * v[j];
    out[i] = acc;
  }
  return out;
}

namespace {

// Householder reduction of a Hermitian matrix (dense buffer `a`, row-major,
// overwritten) to real tridiagonal (d, e). When `q` is non-null the unitary
// accumulates there so that  A = Q T Q^H  with e adjusted to be real.
void tridiagonalize_complex(std::vector<cxd>& a, std::size_t n, std::vector<double>& d,
                            std::vector<double>& e, DenseMatrix* q) {
  std::vector<cxd> sub(n > 0 ? n - 1 : 0, cxd(0.0, 0.0));
  std::vector<cxd> u(n), p(n), w(n);
  if (q) *q = DenseMatrix::identity(n);
  auto at = [&](std::size_t i, std::size_t j) -> cxd& { return a[i * n + j]; };

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(at(i, k));
    const cxd x0 = at(k + 1, k);
    const double tail2 = xnorm2 - std::norm(x0);
    if (xnorm2 == 0.0 || tail2 <= kEps * kEps * xnorm2) {
      sub[k] = x0;   // column already tridiagonal
      continue;
    }
    const double xnorm = std::sqrt(xnorm2);
    const cxd phase = (x0 != cxd(0.0, 0.0)) ? x0 / std::abs(x0) : cxd(1.0, 0.0);
    const cxd alpha = -phase * xnorm;

    // u = (x - alpha e1) / ||.||; |x0 - alpha| = |x0| + ||x||, no cancellation
    u[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) u[i] = at(i, k);
    double unorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) unorm2 += std::norm(u[i]);
    const double uinv = 1.0 / std::sqrt(unorm2);
    for (std::size_t i = k + 1; i < n; ++i) u[i] *= uinv;

    // two-sided rank-2 update on the trailing block with P = I - 2 u u^H
    for (std::size_t i = k + 1; i < n; ++i) {
      cxd acc(0.0, 0.0);
      const cxd* ri = a.data() + i * n;
      for (std::size_t j = k + 1; j < n; ++j) acc += ri[j] * u[j];
      p[i] = acc;
    }
    double kc = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) kc += std::real(std::conj(u[i]) * p[i]);
    for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kc * u[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      cxd* ri = a.data() + i * n;
      const cxd ui2 = 2.0 * u[i];
      const cxd wi2 = 2.0 * w[i];
      for (std::size_t j = k + 1; j < n; ++j)
        ri[j] -= ui2 * std::conj(w[j]) + wi2 * std::conj(u[j]);
    }
    sub[k] = alpha;
    for (std::size_t i = k + 1; i < n; ++i) { at(i, k) = 0.0; at(k, i) = 0.0; }
    at(k + 1, k) = alpha;
    at(k, k + 1) = std::conj(alpha);

    if (q) {
      // Q <- Q (I - 2 u u^H), columns k+1..n-1
      for (std::size_t r = 0; r < n; ++r) {
        cxd* qr = q->row(r);
        cxd z(0.0, 0.0);
        for (std::size_t j = k + 1; j < n; ++j) z += qr[j] * u[j];
        z *= 2.0;
        for (std::size_t j = k + 1; j < n; ++j) qr[j] -= z * std::conj(u[j]);
      }
    }
  }
  if (n >= 2) sub[n - 2] = at(n - 1, n - 2);

  d.resize(n);
  e.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::real(at(i, i));

  // phase-rotate columns so the subdiagonal becomes real nonnegative
  cxd phi(1.0, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const cxd ek = sub[k];
    const double mag = std::abs(ek);
    e[k] = mag;
    const cxd next = (mag > 0.0) ? ek * phi / mag : phi;
    if (q && next != cxd(1.0, 0.0)) {
      for (std::size_t r = 0; r < n; ++r) q->row(r)[k + 1] *= next;
    }
    phi = next;
  }
}

// Real-symmetric fast path; identical structure with real arithmetic.
void tridiagonalize_real(std::vector<double>& a, std::size_t n, std::vector<double>& d,
                         std::vector<double>& e, std::vector<double>* q) {
  std::vector<double> u(n), p(n), w(n);
  if (q) {
    q->assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) (*q)[i * n + i] = 1.0;
  }
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  d.resize(n);
  e.assign(n, 0.0);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += at(i, k) * at(i, k);
    const double x0 = at(k + 1, k);
    const double tail2 = xnorm2 - x0 * x0;
    if (xnorm2 == 0.0 || tail2 <= kEps * kEps * xnorm2) {
      e[k] = x0;
      continue;
    }
    const double xnorm = std::sqrt(xnorm2);
    const double alpha = (x0 >= 0.0) ? -xnorm : xnorm;
    u[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) u[i] = at(i, k);
    double unorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) unorm2 += u[i] * u[i];
    const double uinv = 1.0 / std::sqrt(unorm2);
    for (std::size_t i = k + 1; i < n; ++i) u[i] *= uinv;

    for (std::size_t i = k + 1; i < n; ++i) {
      double acc = 0.0;
      const double* ri = a.data() + i * n;
      for (std::size_t j = k + 1; j < n; ++j) acc += ri[j] * u[j];
      p[i] = acc;
    }
    double kc = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) kc += u[i] * p[i];
    for (std::size_t i = k + 1; i < n; ++i) w[i] = p[i] - kc * u[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      double* ri = a.data() + i * n;
      const double ui2 = 2.0 * u[i];
      const double wi2 = 2.0 * w[i];
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= ui2 * w[j] + wi2 * u[j];
    }
    e[k] = alpha;
    for (std::size_t i = k + 1; i < n; ++i) { at(i, k) = 0.0; at(k, i) = 0.0; }
    at(k + 1, k) = alpha;
    at(k, k + 1) = alpha;

    if (q) {
      for (std::size_t r = 0; r < n; ++r) {
        double* qr = q->data() + r * n;
        double z = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) z += qr[j] * u[j];
        z *= 2.0;
        for (std::size_t j = k + 1; j < n; ++j) qr[j] -= z * u[j];
      }
    }
  }
  if (n >= 2) e[n - 2] = at(n - 1, n - 2);
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
}

// Implicit-shift QL on a real symmetric tridiagonal (d, e); `rotate(i, c, s)`
// applies each plane rotation to eigenvector storage acting on columns
// (i, i+1). Throws ConvergenceFailure when the iteration budget runs out.
template <typename Rotate>
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Rotate&& rotate) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e[n - 1] = 0.0;

  // Absolute deflation floor: dropping e[m] below eps*||T|| is within the
  // usual backward-error allowance and prevents stalls when trailing blocks
  // sit at denormal scale (e.g. Gram matrices of heat-semigroup tails).
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(d[i]) + std::abs(e[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    anorm = std::max(anorm, row);
  }
  const double floor_tol = kEps * anorm;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd || std::abs(e[m]) <= floor_tol) break;
        ++m;
      }
      if (m == l) break;
      if (++iter > kMaxQlIterations)
        throw Error(ErrorKind::ConvergenceFailure, "tridiagonal QL exceeded iteration budget");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = hypot2(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        double f = s * e[ii];
        const double b = c * e[ii];
        r = hypot2(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        rotate(ii, c, s);
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

void sort_ascending(std::vector<double>& values, DenseMatrix* vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = values[idx[i]];
  values = std::move(v);
  if (vectors) {
    DenseMatrix sorted(vectors->rows(), vectors->cols());
    for (std::size_t i = 0; i < vectors->rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) sorted(i, j) = (*vectors)(i, idx[j]);
    *vectors = std::move(sorted);
  }
}

bool is_real(const DenseMatrix& m) {
  for (const cxd& z : m.data())
    if (z.imag() != 0.0) return false;
  return true;
}

}  // namespace

EigenDecomp eigh(const DenseMatrix& m, bool want_vectors) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::NonHermitian, "eigh requires a square matrix");
  if (!m.is_hermitian(1e-12))
    throw Error(ErrorKind::NonHermitian, "matrix is not Hermitian within 1e-12");
  const std::size_t n = m.rows();
  EigenDecomp out;
  if (n == 0) return out;

  std::vector<double> d, e;

  if (is_real(m)) {
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a[i * n + j] = 0.5 * (m(i, j).real() + m(j, i).real());
    std::vector<double> q;
    tridiagonalize_real(a, n, d, e, want_vectors ? &q : nullptr);
    if (want_vectors) {
      ql_implicit(d, e, [&](std::size_t i, double c, double s) {
        for (std::size_t r = 0; r < n; ++r) {
          double* qr = q.data() + r * n;
          const double f = qr[i + 1];
          qr[i + 1] = s * qr[i] + c * f;
          qr[i] = c * qr[i] - s * f;
        }
      });
      out.vectors = DenseMatrix(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.vectors(i, j) = q[i * n + j];
    } else {
      ql_implicit(d, e, [](std::size_t, double, double) {});
    }
  } else {
    std::vector<cxd> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a[i * n + j] = 0.5 * (m(i, j) + std::conj(m(j, i)));
    DenseMatrix q;
    tridiagonalize_complex(a, n, d, e, want_vectors ? &q : nullptr);
    if (want_vectors) {
      ql_implicit(d, e, [&](std::size_t i, double c, double s) {
        for (std::size_t r = 0; r < n; ++r) {
          cxd* qr = q.row(r);
          const cxd f = qr[i + 1];
          qr[i + 1] = s * qr[i] + c * f;
          qr[i] = c * qr[i] - s * f;
        }
      });
      out.vectors = std::move(q);
    } else {
      ql_implicit(d, e, [](std::size_t, double, double) {});
    }
  }
  out.values = std::move(d);
  sort_ascending(out.values, want_vectors ? &out.vectors : nullptr);
  return out;
}

double op_norm_euclid(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.max_abs() == 0.0) return 0.0;
  // Gram matrix of the smaller dimension keeps the eigensolve cheap.
  const bool tall = m.rows() >= m.cols();
  const DenseMatrix g = tall ? m.adjoint() * m : m * m.adjoint();
  // Symmetrize against rounding before the Hermitian solve.
  const std::size_t n = g.rows();
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = 0.5 * (g(i, j) + std::conj(g(j, i)));
  EigenDecomp dec = eigh(h, false);
  const double top = dec.values.empty() ? 0.0 : dec.values.back();
  return std::sqrt(std::max(0.0, top));
}

DenseMatrix solve(const DenseMatrix& m, const DenseMatrix& b) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::Singular, "solve requires a square matrix");
  if (b.rows() != m.rows())
    throw Error(ErrorKind::DimensionMismatch, "solve right-hand side shape");
  const std::size_t n = m.rows(), k = b.cols();
  std::vector<cxd> lu(m.data().begin(), m.data().end());
  std::vector<std::size_t> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  const double tol = 1e-13 * std::max(m.max_abs(), kEps);

  auto at = [&](std::size_t i, std::size_t j) -> cxd& { return lu[i * n + j]; };
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_mag = std::abs(at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      const double mag = std::abs(at(i, col));
      if (mag > best_mag) { best = i; best_mag = mag; }
    }
    if (best_mag <= tol)
      throw Error(ErrorKind::Singular, "pivot below tolerance in LU");
    if (best != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(at(best, j), at(col, j));
      std::swap(piv[best], piv[col]);
    }
    const cxd inv_piv = 1.0 / at(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      const cxd f = at(i, col) * inv_piv;
      at(i, col) = f;
      if (f == cxd(0.0, 0.0)) continue;
      for (std::size_t j = col + 1; j < n; ++j) at(i, j) -= f * at(col, j);
    }
  }

  DenseMatrix x(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) x(i, j) = b(piv[i], j);
  // forward: L y = P b (unit diagonal)
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t col = 0; col < i; ++col) {
      const cxd f = at(i, col);
      if (f == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
  // back: U x = y
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t col = i + 1; col < n; ++col) {
      const cxd f = at(i, col);
      if (f == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
    const cxd inv = 1.0 / at(i, i);
    for (std::size_t j = 0; j < k; ++j) x(i, j) *= inv;
  }
  return x;
}

DenseMatrix cholesky(const DenseMatrix& m) {
  if (!m.is_hermitian(1e-12))
    throw Error(ErrorKind::NonHermitian, "cholesky requires a Hermitian matrix");
  const std::size_t n = m.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(m(i, i).real()));
  const double tol = 1e-13 * std::max(max_diag, kEps);

  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m(j, j).real();
    for (std::size_t p = 0; p < j; ++p) diag -= std::norm(l(j, p));
    if (diag <= tol)
      throw Error(ErrorKind::NotPositiveDefinite, "pivot not positive in Cholesky");
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cxd acc = m(i, j);
      for (std::size_t p = 0; p < j; ++p) acc -= l(i, p) * std::conj(l(j, p));
      l(i, j) = acc / ljj;
    }
  }
  return l;
}

DenseMatrix forward_subst(const DenseMatrix& l, const DenseMatrix& b) {
  if (l.rows() != l.cols() || b.rows() != l.rows())
    throw Error(ErrorKind::DimensionMismatch, "forward substitution shapes");
  const std::size_t n = l.rows(), k = b.cols();
  DenseMatrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t col = 0; col < i; ++col) {
      const cxd f = l(i, col);
      if (f == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
    const cxd inv = 1.0 / l(i, i);
    for (std::size_t j = 0; j < k; ++j) x(i, j) *= inv;
  }
  return x;
}

DenseMatrix adjoint_back_subst(const DenseMatrix& l, const DenseMatrix& b) {
  if (l.rows() != l.cols() || b.rows() != l.rows())
    throw Error(ErrorKind::DimensionMismatch, "back substitution shapes");
  const std::size_t n = l.rows(), k = b.cols();
  DenseMatrix x = b;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t col = i + 1; col < n; ++col) {
      const cxd f = std::conj(l(col, i));
      if (f == cxd(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < k; ++j) x(i, j) -= f * x(col, j);
    }
    const cxd inv = 1.0 / std::conj(l(i, i));
    for (std::size_t j = 0; j < k; ++j) x(i, j) *= inv;
  }
  return x;
}

}  // namespace resolvlab::numlin
