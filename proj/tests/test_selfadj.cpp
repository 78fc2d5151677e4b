#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "resolvlab/selfadj.hpp"

using namespace resolvlab;
using namespace resolvlab::numlin;
using namespace resolvlab::wspace;
using namespace resolvlab::selfadj;

namespace {

WeightedSpace unit_space(std::size_t m) {
  // spacing 1, unit weights: W = I
  return WeightedSpace(Grid(0.0, double(m + 1), m), std::vector<double>(m, 1.0));
}

SelfAdjointOp diag_op(std::vector<double> d) {
  const std::size_t m = d.size();
  return from_form(unit_space(m), DenseMatrix::diagonal(d));
}

SelfAdjointOp random_op(std::size_t m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix k(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const cxd v = (i == j) ? cxd(g(rng), 0.0) : cxd(g(rng), g(rng));
      k(i, j) = v;
      k(j, i) = std::conj(v);
    }
  std::uniform_real_distribution<double> wgt(0.4, 2.0);
  std::vector<double> w(m);
  for (auto& x : w) x = wgt(rng);
  return from_form(WeightedSpace(Grid(0.0, 1.0, m), w), k);
}

double wnorm(const DenseMatrix& m, const WeightedSpace& s) { return weighted_op_norm(m, s, s); }

}  // namespace

TEST_CASE("from_form: pinned action matrices") {
  SelfAdjointOp a = diag_op({1.0, 2.0});
  DenseMatrix act = a.action();
  CHECK(std::abs(act(0, 0) - cxd(1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(act(1, 1) - cxd(2.0, 0.0)) <= 1e-15);

  // weights (2,2), h = 1, K = diag(4,8) -> A = W^{-1}K = diag(2,4)
  WeightedSpace s(Grid(0.0, 3.0, 2), {2.0, 2.0});
  std::vector<double> d = {4.0, 8.0};
  SelfAdjointOp b = from_form(s, DenseMatrix::diagonal(d));
  CHECK(spectrum(b)[0] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(spectrum(b)[1] == doctest::Approx(4.0).epsilon(1e-13));

  DenseMatrix k(2, 2);
  k(0, 1) = 1.0;
  k(1, 0) = 1.0;
  SelfAdjointOp c = from_form(unit_space(2), k);
  CHECK(spectrum(c)[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(spectrum(c)[1] == doctest::Approx(1.0).epsilon(1e-13));

  DenseMatrix bad(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(from_form(unit_space(2), bad), Error);
}

TEST_CASE("decomposition invariants: W-orthonormal vectors, A V = V Lambda") {
  auto rng = std::mt19937_64(5);
  for (int trial = 0; trial < 6; ++trial) {
    SelfAdjointOp a = random_op(14, rng);
    const DenseMatrix& v = a.eigenvectors();
    DenseMatrix gram = v.adjoint();
    gram.scale_cols(a.space().mass());
    gram = gram * v;
    gram -= DenseMatrix::identity(a.dim());
    CHECK(gram.max_abs() <= 1e-10);

    DenseMatrix av = a.action() * v;
    DenseMatrix vl = v;
    vl.scale_cols(a.eigenvalues());
    av -= vl;
    CHECK(av.max_abs() <= 1e-9 * std::max(1.0, a.op_norm()));
  }
}

TEST_CASE("spectrum: diagonal and discrete Laplacian closed form") {
  SelfAdjointOp a = diag_op({3.0, 1.0});
  CHECK(spectrum(a)[0] == doctest::Approx(1.0));
  CHECK(spectrum(a)[1] == doctest::Approx(3.0));

  // Dirichlet Laplacian on (0, 4), m = 3, h = 1: eigenvalues 2 - sqrt2, 2, 2 + sqrt2
  const std::size_t m = 3;
  WeightedSpace s(Grid(0.0, 4.0, m), std::vector<double>(m, 1.0));
  const double h = s.grid().spacing();
  DenseMatrix k(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    k(i, i) = 2.0 / h;
    if (i + 1 < m) {
      k(i, i + 1) = -1.0 / h;
      k(i + 1, i) = -1.0 / h;
    }
  }
  SelfAdjointOp lap = from_form(s, k);
  CHECK(spectrum(lap)[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(spectrum(lap)[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectrum(lap)[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));

  // free Laplacian on (0, pi), m = 200: first eigenvalue near 1, matching
  // the discrete closed form (4/h^2) sin^2(h/2)
  const std::size_t big = 200;
  WeightedSpace sp(Grid(0.0, std::numbers::pi, big), std::vector<double>(big, 1.0));
  const double hp = sp.grid().spacing();
  DenseMatrix kp(big, big);
  for (std::size_t i = 0; i < big; ++i) {
    kp(i, i) = 2.0 / hp;
    if (i + 1 < big) {
      kp(i, i + 1) = -1.0 / hp;
      kp(i + 1, i) = -1.0 / hp;
    }
  }
  SelfAdjointOp lap2 = from_form(sp, kp);
  const double closed = 4.0 / (hp * hp) * std::pow(std::sin(hp / 2.0), 2);
  CHECK(spectrum(lap2)[0] == doctest::Approx(closed).epsilon(1e-10));
  CHECK(std::abs(spectrum(lap2)[0] - 1.0) <= 1e-3);
  CHECK(lower_bound(lap2) > 0.0);
}

TEST_CASE("resolvent: pinned values and guard") {
  SelfAdjointOp a = diag_op({1.0, 2.0});
  DenseMatrix r = resolvent(a, cxd(0.0, 1.0));
  CHECK(std::abs(r(0, 0) - 1.0 / cxd(1.0, -1.0)) <= 1e-14);
  CHECK(std::abs(r(1, 1) - 1.0 / cxd(2.0, -1.0)) <= 1e-14);

  SelfAdjointOp zero = diag_op({0.0});
  DenseMatrix rz = resolvent(zero, cxd(0.0, 1.0));
  CHECK(std::abs(rz(0, 0) - cxd(0.0, 1.0)) <= 1e-15);   // (0 - i)^{-1} = i

  try {
    resolvent(a, cxd(2.0 + 1e-15, 0.0));
    FAIL("expected SpectrumProximity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SpectrumProximity);
  }
}

TEST_CASE("resolvent: first resolvent formula and norm identity") {
  auto rng = std::mt19937_64(11);
  SelfAdjointOp a = random_op(12, rng);
  const cxd z1(0.3, 1.2), z2(-1.0, 0.7);
  DenseMatrix r1 = resolvent(a, z1);
  DenseMatrix r2 = resolvent(a, z2);
  DenseMatrix lhs = r1;
  lhs -= r2;
  DenseMatrix rhs = (z1 - z2) * (r1 * r2);
  rhs -= lhs;
  CHECK(wnorm(rhs, a.space()) <= 1e-9 * std::max(1.0, wnorm(lhs, a.space())));

  // || R(z) || * dist(z, spectrum) = 1 for a normal operator
  const double nrm = wnorm(r1, a.space());
  CHECK(nrm * a.spectral_gap(z1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("func_calc: pinned samples, multiplicativity, star-compatibility") {
  SelfAdjointOp a = diag_op({0.0, 1.0});
  DenseMatrix one = func_calc(a, [](double) { return cxd(1.0, 0.0); });
  one -= DenseMatrix::identity(2);
  CHECK(one.max_abs() <= 1e-13);

  DenseMatrix id = func_calc(a, [](double t) { return cxd(t, 0.0); });
  id -= a.action();
  CHECK(id.max_abs() <= 1e-13);

  DenseMatrix inv = func_calc(a, [](double t) { return cxd(1.0 / (1.0 + t * t), 0.0); });
  CHECK(std::abs(inv(0, 0) - cxd(1.0, 0.0)) <= 1e-13);
  CHECK(std::abs(inv(1, 1) - cxd(0.5, 0.0)) <= 1e-13);

  auto rng = std::mt19937_64(13);
  SelfAdjointOp b = random_op(10, rng);
  auto f = [](double t) { return std::exp(cxd(0.0, t)) / (1.0 + t * t); };
  auto g = [](double t) { return cxd(std::atan(t), std::cos(t)); };
  DenseMatrix fg = func_calc(b, [&](double t) { return f(t) * g(t); });
  DenseMatrix prod = func_calc(b, f) * func_calc(b, g);
  prod -= fg;
  CHECK(wnorm(prod, b.space()) <= 1e-9);

  // f*(A) = f(A)^* in the weighted adjoint
  DenseMatrix fs = func_calc(b, [&](double t) { return std::conj(f(t)); });
  DenseMatrix fadj = weighted_adjoint(func_calc(b, f), b.space());
  fadj -= fs;
  CHECK(wnorm(fadj, b.space()) <= 1e-10);

  CHECK_THROWS_AS(func_calc(a, [](double) { return cxd(std::nan(""), 0.0); }), Error);
}

TEST_CASE("spectral_projection: pinned windows") {
  SelfAdjointOp a = diag_op({1.0, 2.0, 3.0});
  Projection p = spectral_projection(a, {1.5, 2.5});
  CHECK(p.rank == 1);
  std::vector<cxd> e1 = {0.0, 1.0, 0.0};
  auto pe = numlin::apply(p.matrix, e1);
  CHECK(std::abs(pe[1] - cxd(1.0, 0.0)) <= 1e-13);
  CHECK(std::abs(pe[0]) + std::abs(pe[2]) <= 1e-13);

  Projection full = spectral_projection(a, {0.0, 4.0});
  CHECK(full.rank == 3);
  DenseMatrix diff = full.matrix;
  diff -= DenseMatrix::identity(3);
  CHECK(diff.max_abs() <= 1e-12);

  const double guard = endpoint_guard(a, {0.0, 0.0, 0.0});
  try {
    spectral_projection(a, {2.0 - guard / 2.0, 3.0 + 1.0});
    FAIL("expected EndpointCollision");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EndpointCollision);
  }
}

TEST_CASE("spectral_projection: idempotent, self-adjoint, lattice identities") {
  auto rng = std::mt19937_64(17);
  SelfAdjointOp a = random_op(12, rng);
  const auto& ev = a.eigenvalues();
  const double lo = 0.5 * (ev[3] + ev[4]);
  const double hi = 0.5 * (ev[8] + ev[9]);
  Projection p = spectral_projection(a, {lo, hi});
  CHECK(p.rank == 5);

  DenseMatrix p2 = p.matrix * p.matrix;
  p2 -= p.matrix;
  CHECK(wnorm(p2, a.space()) <= 1e-10);
  DenseMatrix adj = weighted_adjoint(p.matrix, a.space());
  adj -= p.matrix;
  CHECK(wnorm(adj, a.space()) <= 1e-10);

  // nested and disjoint products
  const double mid = 0.5 * (ev[5] + ev[6]);
  Projection inner = spectral_projection(a, {lo, mid});
  DenseMatrix prod = p.matrix * inner.matrix;
  prod -= inner.matrix;
  CHECK(wnorm(prod, a.space()) <= 1e-10);

  Projection disjoint = spectral_projection(a, {mid, hi});
  DenseMatrix zero = inner.matrix * disjoint.matrix;
  CHECK(wnorm(zero, a.space()) <= 1e-10);

  // P((-inf, hi)) - P((-inf, lo)) = P((lo, hi)) with endpoints off the spectrum
  const double below = ev.front() - 1.0;
  Projection lower_hi = spectral_projection(a, {below, hi});
  Projection lower_lo = spectral_projection(a, {below, lo});
  DenseMatrix band = lower_hi.matrix;
  band -= lower_lo.matrix;
  band -= p.matrix;
  CHECK(wnorm(band, a.space()) <= 1e-10);
  CHECK(lower_hi.rank - lower_lo.rank == p.rank);
}

TEST_CASE("spectral_measure: pinned values and additivity") {
  SelfAdjointOp a = diag_op({1.0, 2.0, 3.0});
  // eigenvector of 2 has unit measure in an isolating window
  std::vector<cxd> e1 = {0.0, 1.0, 0.0};
  CHECK(spectral_measure(a, e1, {1.5, 2.5}) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(spectral_measure(a, e1, {5.0, 6.0}) == doctest::Approx(0.0));

  const double s = 1.0 / std::sqrt(2.0);
  std::vector<cxd> mix = {s, s, 0.0};
  CHECK(spectral_measure(a, mix, {0.5, 1.5}) == doctest::Approx(0.5).epsilon(1e-13));

  // partition of a covering interval sums to ||psi||^2
  auto rng = std::mt19937_64(23);
  SelfAdjointOp b = random_op(9, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cxd> psi(9);
  for (auto& z : psi) z = cxd(g(rng), g(rng));
  const double lo = b.eigenvalues().front() - 0.5;
  const double hi = b.eigenvalues().back() + 0.5;
  double total = 0.0;
  const int parts = 7;
  for (int i = 0; i < parts; ++i) {
    double wl = lo + (hi - lo) * i / parts;
    double wh = lo + (hi - lo) * (i + 1) / parts;
    // nudge split points off the spectrum
    for (double ev : b.eigenvalues()) {
      if (std::abs(wl - ev) < 1e-6) wl += 1e-4;
      if (std::abs(wh - ev) < 1e-6) wh += 1e-4;
    }
    total += spectral_measure(b, psi, {wl, wh});
  }
  const double n2 = std::pow(b.space().norm(psi), 2);
  CHECK(std::abs(total - n2) <= 1e-10 * std::max(1.0, n2));
}

TEST_CASE("unitary group and heat semigroup") {
  SelfAdjointOp a = diag_op({1.0, 2.0});
  DenseMatrix u0 = unitary_group(a, 0.0);
  u0 -= DenseMatrix::identity(2);
  CHECK(u0.max_abs() <= 1e-14);
  DenseMatrix h0 = heat_semigroup(a, 0.0);
  h0 -= DenseMatrix::identity(2);
  CHECK(h0.max_abs() <= 1e-14);

  DenseMatrix h1 = heat_semigroup(a, 1.0);
  CHECK(std::abs(h1(0, 0) - cxd(std::exp(-1.0), 0.0)) <= 1e-14);
  CHECK(std::abs(h1(1, 1) - cxd(std::exp(-2.0), 0.0)) <= 1e-14);

  auto rng = std::mt19937_64(29);
  SelfAdjointOp b = random_op(11, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cxd> psi(11);
  for (auto& z : psi) z = cxd(g(rng), g(rng));
  auto upsi = numlin::apply(unitary_group(b, 0.7), psi);
  CHECK(b.space().norm(upsi) == doctest::Approx(b.space().norm(psi)).epsilon(1e-10));

  // unitary w.r.t. the weighted norm: U^* U = I
  DenseMatrix u = unitary_group(b, 0.7);
  DenseMatrix uu = weighted_adjoint(u, b.space()) * u;
  uu -= DenseMatrix::identity(11);
  CHECK(wnorm(uu, b.space()) <= 1e-10);

  // semigroup law, relative to the semigroup's own scale e^{-t lambda_min}
  DenseMatrix h13 = heat_semigroup(b, 1.3);
  DenseMatrix hs = heat_semigroup(b, 0.4) * heat_semigroup(b, 0.9);
  hs -= h13;
  CHECK(wnorm(hs, b.space()) <= 1e-9 * std::max(1.0, wnorm(h13, b.space())));

  try {
    heat_semigroup(b, -0.1);
    FAIL("expected NegativeTime");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NegativeTime);
  }
}

TEST_CASE("lower_bound") {
  CHECK(lower_bound(diag_op({-1.0, 5.0})) == doctest::Approx(-1.0));
}
