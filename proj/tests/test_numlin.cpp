#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "resolvlab/numlin.hpp"

using namespace resolvlab;
using namespace resolvlab::numlin;

namespace {

std::mt19937_64 rng_for(unsigned seed) { return std::mt19937_64(seed); }

DenseMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = cxd(g(rng), g(rng));
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  return h;
}

DenseMatrix random_real_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = g(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  return a;
}

double reconstruction_residual(const DenseMatrix& m, const EigenDecomp& d) {
  DenseMatrix vl = d.vectors;
  vl.scale_cols(d.values);                       // V Λ
  DenseMatrix rec = vl * d.vectors.adjoint();    // V Λ V^H
  rec -= m;
  return rec.frobenius();
}

double orthonormality_defect(const DenseMatrix& v) {
  DenseMatrix g = v.adjoint() * v;
  g -= DenseMatrix::identity(v.cols());
  return g.max_abs();
}

}  // namespace

TEST_CASE("eigh: diagonal case") {
  std::vector<double> d = {3.0, 1.0, 2.0};
  auto dec = eigh(DenseMatrix::diagonal(d));
  REQUIRE(dec.values.size() == 3);
  CHECK(dec.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dec.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dec.values[2] == doctest::Approx(3.0).epsilon(1e-14));
  // permuted identity columns
  for (std::size_t j = 0; j < 3; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < 3; ++i) best = std::max(best, std::abs(dec.vectors(i, j)));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("eigh: 2x2 symmetric off-diagonal") {
  DenseMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  auto dec = eigh(m);
  CHECK(dec.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(dec.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  const double s = 1.0 / std::sqrt(2.0);
  // eigenvectors are (1, ∓1)/√2 up to phase
  CHECK(std::abs(dec.vectors(0, 0)) == doctest::Approx(s).epsilon(1e-12));
  CHECK(std::abs(dec.vectors(1, 0)) == doctest::Approx(s).epsilon(1e-12));
  CHECK(reconstruction_residual(m, dec) <= 1e-14);
}

TEST_CASE("eigh: 3x3 Dirichlet Laplacian closed form") {
  // tridiag(-1, 2, -1): eigenvalues 4 sin^2(k pi / 8), k = 1..3
  DenseMatrix m(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < 3) {
      m(i, i + 1) = -1.0;
      m(i + 1, i) = -1.0;
    }
  }
  auto dec = eigh(m);
  const double pi = std::numbers::pi;
  for (int k = 1; k <= 3; ++k) {
    const double expect = 4.0 * std::pow(std::sin(k * pi / 8.0), 2);
    CHECK(dec.values[k - 1] == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(dec.values[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-13));
  CHECK(dec.values[1] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(dec.values[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("eigh: rejects non-Hermitian input") {
  DenseMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 2.0;
  CHECK_THROWS_WITH_AS(eigh(m), doctest::Contains("Hermitian"), Error);
  try {
    eigh(m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonHermitian);
  }
}

TEST_CASE("eigh: random Hermitian reconstruction and orthonormality") {
  auto rng = rng_for(1234);
  std::uniform_int_distribution<std::size_t> size(1, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng);
    DenseMatrix m = (trial % 2 == 0) ? random_hermitian(n, rng) : random_real_symmetric(n, rng);
    auto dec = eigh(m);
    // eigenvalues of a Hermitian matrix are real and ascending
    for (std::size_t i = 0; i + 1 < dec.values.size(); ++i)
      CHECK(dec.values[i] <= dec.values[i + 1]);
    CHECK(reconstruction_residual(m, dec) <= 1e-10 * std::max(1.0, m.frobenius()));
    CHECK(orthonormality_defect(dec.vectors) <= 1e-10);
  }
}

TEST_CASE("eigh: values-only agrees with full decomposition") {
  auto rng = rng_for(77);
  DenseMatrix m = random_hermitian(23, rng);
  auto full = eigh(m, true);
  auto vals = eigh(m, false);
  REQUIRE(vals.values.size() == full.values.size());
  for (std::size_t i = 0; i < vals.values.size(); ++i)
    CHECK(vals.values[i] == doctest::Approx(full.values[i]).epsilon(1e-11));
  CHECK(vals.vectors.empty());
}

TEST_CASE("op_norm_euclid: pinned cases") {
  CHECK(op_norm_euclid(DenseMatrix(3, 3)) == 0.0);
  std::vector<double> d = {1.0, -3.0};
  CHECK(op_norm_euclid(DenseMatrix::diagonal(d)) == doctest::Approx(3.0).epsilon(1e-10));
  DenseMatrix n(2, 2);
  n(0, 1) = 2.0;   // nilpotent: sigma_max = sqrt(max eig of M^H M) = 2
  CHECK(op_norm_euclid(n) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("op_norm_euclid: equals norm of the conjugate transpose") {
  auto rng = rng_for(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 30);
    const std::size_t r = size(rng), c = size(rng);
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = cxd(g(rng), g(rng));
    const double a = op_norm_euclid(m);
    const double b = op_norm_euclid(m.adjoint());
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
  }
}

TEST_CASE("solve: identity and diagonal") {
  auto rng = rng_for(5);
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix b(4, 2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) b(i, j) = cxd(g(rng), g(rng));
  DenseMatrix x = solve(DenseMatrix::identity(4), b);
  DenseMatrix diff = x;
  diff -= b;
  CHECK(diff.max_abs() <= 1e-14);

  std::vector<double> d = {2.0, 4.0};
  DenseMatrix inv = solve(DenseMatrix::diagonal(d), DenseMatrix::identity(2));
  CHECK(std::abs(inv(0, 0) - cxd(0.5, 0.0)) <= 1e-15);
  CHECK(std::abs(inv(1, 1) - cxd(0.25, 0.0)) <= 1e-15);
}

TEST_CASE("solve: residual bound on random well-conditioned systems") {
  auto rng = rng_for(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5;
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = cxd(g(rng), g(rng));
      m(i, i) += 6.0;   // diagonally dominant, hence well conditioned
    }
    DenseMatrix b(n, 3);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 3; ++j) b(i, j) = cxd(g(rng), g(rng));
    DenseMatrix x = solve(m, b);
    DenseMatrix r = m * x;
    r -= b;
    CHECK(r.frobenius() <= 1e-9 * std::max(1.0, b.frobenius()));
  }
}

TEST_CASE("solve: round-trip solve(M, M X) recovers X") {
  auto rng = rng_for(32);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 12;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = cxd(g(rng), g(rng));
    m(i, i) += 8.0;
  }
  DenseMatrix x(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) x(i, j) = cxd(g(rng), g(rng));
  DenseMatrix got = solve(m, m * x);
  got -= x;
  CHECK(got.frobenius() <= 1e-8 * std::max(1.0, x.frobenius()));
}

TEST_CASE("solve: singular pivot raises") {
  DenseMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  m(1, 1) = 1.0;
  try {
    solve(m, DenseMatrix::identity(2));
    FAIL("expected Singular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("cholesky: pinned cases") {
  DenseMatrix l = cholesky(DenseMatrix::identity(3));
  DenseMatrix diff = l;
  diff -= DenseMatrix::identity(3);
  CHECK(diff.max_abs() <= 1e-15);

  std::vector<double> d = {4.0, 9.0};
  l = cholesky(DenseMatrix::diagonal(d));
  CHECK(std::abs(l(0, 0) - cxd(2.0, 0.0)) <= 1e-15);
  CHECK(std::abs(l(1, 1) - cxd(3.0, 0.0)) <= 1e-15);

  DenseMatrix m(2, 2);
  m(0, 0) = 2.0; m(0, 1) = 1.0; m(1, 0) = 1.0; m(1, 1) = 2.0;
  l = cholesky(m);
  DenseMatrix rec = l * l.adjoint();
  rec -= m;
  CHECK(rec.frobenius() <= 1e-12);
}

TEST_CASE("cholesky: random Hermitian positive definite reconstruction") {
  auto rng = rng_for(8);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> size(1, 25);
    const std::size_t n = size(rng);
    DenseMatrix g = random_hermitian(n, rng);
    DenseMatrix m = g * g.adjoint();   // PSD
    for (std::size_t i = 0; i < n; ++i) m(i, i) += 0.5;
    // re-hermitize against rounding from the product
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    DenseMatrix l = cholesky(h);
    DenseMatrix rec = l * l.adjoint();
    rec -= h;
    CHECK(rec.frobenius() <= 1e-10 * std::max(1.0, h.frobenius()));
  }
}

TEST_CASE("cholesky: indefinite input raises") {
  std::vector<double> d = {1.0, -1.0};
  try {
    cholesky(DenseMatrix::diagonal(d));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
  }
}

TEST_CASE("cholesky solves agree with LU solve") {
  auto rng = rng_for(21);
  const std::size_t n = 9;
  DenseMatrix g = random_hermitian(n, rng);
  DenseMatrix m = g * g.adjoint();
  for (std::size_t i = 0; i < n; ++i) m(i, i) += 1.0;
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  std::normal_distribution<double> gd(0.0, 1.0);
  DenseMatrix b(n, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 2; ++j) b(i, j) = cxd(gd(rng), gd(rng));

  DenseMatrix l = cholesky(h);
  DenseMatrix x1 = adjoint_back_subst(l, forward_subst(l, b));
  DenseMatrix x2 = solve(h, b);
  x1 -= x2;
  CHECK(x1.frobenius() <= 1e-8 * std::max(1.0, x2.frobenius()));
}

TEST_CASE("from_entries rejects non-finite data") {
  std::vector<cxd> bad = {cxd(1.0, 0.0), cxd(std::nan(""), 0.0)};
  try {
    DenseMatrix::from_entries(1, 2, bad);
    FAIL("expected NonFiniteEntries");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteEntries);
  }
}
