#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "resolvlab/sturm.hpp"

using namespace resolvlab;
using namespace resolvlab::numlin;
using namespace resolvlab::wspace;
using namespace resolvlab::sturm;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField constant(double c) {
  return [c](double) { return c; };
}

Coefficients coeffs(ScalarField w, ScalarField p, ScalarField q, double delta = 0.1,
                    double gamma = 0.0) {
  return Coefficients{std::move(w), std::move(p), std::move(q), delta, gamma};
}

std::vector<cxd> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<cxd> v(n);
  for (auto& z : v) z = cxd(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("discretize: free problem closed form on (0,4), m = 3") {
  SLProblem prob{Grid(0.0, 4.0, 3), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  auto op = discretize(prob);
  CHECK(spectrum(op)[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(spectrum(op)[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectrum(op)[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("discretize: constant potential shifts the spectrum exactly") {
  SLProblem base{Grid(0.0, 4.0, 5), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  SLProblem shifted{base.grid, coeffs(constant(1.0), constant(1.0), constant(2.5))};
  auto s0 = spectrum(discretize(base));
  auto s1 = spectrum(discretize(shifted));
  for (std::size_t k = 0; k < s0.size(); ++k)
    CHECK(s1[k] == doctest::Approx(s0[k] + 2.5).epsilon(1e-12));
}

TEST_CASE("discretize: doubling w halves the spectrum") {
  SLProblem base{Grid(0.0, 4.0, 5), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  SLProblem heavy{base.grid, coeffs(constant(2.0), constant(1.0), constant(0.0))};
  auto s0 = spectrum(discretize(base));
  auto s1 = spectrum(discretize(heavy));
  for (std::size_t k = 0; k < s0.size(); ++k)
    CHECK(s1[k] == doctest::Approx(0.5 * s0[k]).epsilon(1e-12));
}

TEST_CASE("discretize: sign violations raise") {
  SLProblem bad_w{Grid(0.0, 4.0, 3),
                  coeffs([](double x) { return 1.0 - x; }, constant(1.0), constant(0.0))};
  try {
    discretize(bad_w);
    FAIL("expected CoefficientSignViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoefficientSignViolation);
  }
  SLProblem bad_p{Grid(0.0, 4.0, 3),
                  coeffs(constant(1.0), [](double x) { return x < 2.0 ? 1.0 : -1.0; }, constant(0.0))};
  CHECK_THROWS_AS(discretize(bad_p), Error);
}

TEST_CASE("form_value: zero vector, Rayleigh quotient, positivity, K consistency") {
  const std::size_t m = 40;
  SLProblem prob{Grid(0.0, kPi, m), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  std::vector<cxd> zero(m, cxd(0.0, 0.0));
  CHECK(form_value(prob, zero) == doctest::Approx(0.0));

  // first discrete sine mode is the ground eigenvector of the free problem
  auto op = discretize(prob);
  std::vector<cxd> f(m);
  for (std::size_t i = 0; i < m; ++i)
    f[i] = std::sin(kPi * (prob.grid.node(i)) / kPi);
  const double n2 = std::pow(op.space().norm(f), 2);
  CHECK(form_value(prob, f) == doctest::Approx(spectrum(op)[0] * n2).epsilon(1e-10));

  // q >= 0 keeps the form nonnegative; and the form equals Re(f^H K f)
  auto rng = std::mt19937_64(3);
  SLProblem withq{prob.grid,
                  coeffs(constant(1.0), [](double x) { return 1.0 + 0.5 * std::cos(x); },
                         [](double x) { return x * x / (1.0 + x * x); })};
  auto opq = discretize(withq);
  for (int trial = 0; trial < 10; ++trial) {
    auto v = random_vec(m, rng);
    const double form = form_value(withq, v);
    CHECK(form >= 0.0);
    const auto kv = numlin::apply(opq.form_matrix(), v);
    cxd quad(0.0, 0.0);
    for (std::size_t i = 0; i < m; ++i) quad += std::conj(v[i]) * kv[i];
    CHECK(form == doctest::Approx(quad.real()).epsilon(1e-12));
  }
}

TEST_CASE("factorize: exact identity D*D = T0") {
  // unit coefficients give the standard Dirichlet Laplacian
  const std::size_t m = 12;
  SLProblem prob{Grid(0.0, 2.0, m), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  auto fac = factorize(prob);
  auto op = discretize(prob);
  Embedding d_embed(op.space(), fac.staggered, fac.d_map);
  DenseMatrix dstar = adjoint_map(d_embed);
  DenseMatrix dd = dstar * fac.d_map;
  DenseMatrix t0 = op.action();
  dd -= t0;
  CHECK(weighted_op_norm(dd, op.space(), op.space()) <=
        1e-12 * weighted_op_norm(t0, op.space(), op.space()));

  // 50 random positive coefficient draws
  auto rng = std::mt19937_64(17);
  std::uniform_real_distribution<double> amp(0.1, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    const double aw = amp(rng), ap = amp(rng);
    const double fw = amp(rng) * 4.0, fp = amp(rng) * 4.0;
    SLProblem rp{Grid(0.0, 2.0, 10),
                 coeffs([=](double x) { return 1.0 + aw * std::sin(fw * x); },
                        [=](double x) { return 1.0 + ap * std::cos(fp * x); }, constant(0.0))};
    auto rfac = factorize(rp);
    auto rop = discretize(rp);
    Embedding emb(rop.space(), rfac.staggered, rfac.d_map);
    DenseMatrix rdd = adjoint_map(emb) * rfac.d_map;
    DenseMatrix rt0 = rop.action();
    rdd -= rt0;
    CHECK(weighted_op_norm(rdd, rop.space(), rop.space()) <=
          1e-12 * weighted_op_norm(rt0, rop.space(), rop.space()));
  }
}

TEST_CASE("factorize: discrete integration by parts <Df, Df> = form_value") {
  const std::size_t m = 15;
  SLProblem prob{Grid(-1.0, 1.5, m),
                 coeffs([](double x) { return 1.2 + 0.3 * std::sin(x); },
                        [](double x) { return 0.8 + 0.4 * std::cos(2.0 * x); }, constant(0.0))};
  auto fac = factorize(prob);
  auto rng = std::mt19937_64(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_vec(m, rng);
    const auto df = numlin::apply(fac.d_map, f);
    const double lhs = std::pow(fac.staggered.norm(df), 2);
    CHECK(lhs == doctest::Approx(form_value(prob, f)).epsilon(1e-12));
  }
}

TEST_CASE("factorize: nonzero potential raises") {
  SLProblem prob{Grid(0.0, 1.0, 4), coeffs(constant(1.0), constant(1.0), constant(0.5))};
  try {
    factorize(prob);
    FAIL("expected NonZeroPotential");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonZeroPotential);
  }
}

TEST_CASE("local_l1_bound: pinned cells") {
  CHECK(local_l1_bound(constant(3.0), 0.0, 10.0, 0.01) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(local_l1_bound(constant(-3.0), 0.0, 10.0, 0.01) == doctest::Approx(3.0).epsilon(1e-12));
  // q(x) = x on (0,2): cells [0,1) and [1,2) integrate to 0.5 and 1.5
  CHECK(local_l1_bound([](double x) { return x; }, 0.0, 2.0, 1e-3) ==
        doctest::Approx(1.5).epsilon(1e-9));
  CHECK(local_l1_bound(constant(0.0), 0.0, 5.0, 0.1) == doctest::Approx(0.0));
}

TEST_CASE("qfree_check: pinned cases") {
  // q == 1, w = p = 1 on (0,1): LHS = ||f||^2 and M = 1, so RHS >= LHS
  SLProblem unit{Grid(0.0, 1.0, 30), coeffs(constant(1.0), constant(1.0), constant(1.0))};
  for (double eps : {0.1, 1.0, 10.0}) {
    auto rep = qfree_check(unit, eps, 60);
    CHECK(rep.holds);
    CHECK(rep.worst_ratio <= 1.0);
  }

  SLProblem zero{Grid(0.0, 1.0, 30), coeffs(constant(1.0), constant(1.0), constant(0.0))};
  auto rep0 = qfree_check(zero, 0.5, 40);
  CHECK(rep0.worst_ratio == doctest::Approx(0.0));

  // q = 5 sin^2 x on (0, pi)
  SLProblem sine{Grid(0.0, kPi, 200),
                 coeffs(constant(1.0), constant(1.0),
                        [](double x) { return 5.0 * std::pow(std::sin(x), 2); })};
  for (double eps : {0.1, 1.0}) {
    auto rep = qfree_check(sine, eps, 200);
    CHECK(rep.holds);
    CHECK(rep.worst_ratio <= 1.05);
  }
}

TEST_CASE("make_embedding: metrics against multiplication oracles") {
  Grid grid(0.0, kPi, 25);
  auto base = coeffs(constant(1.0), constant(1.0), constant(0.0));
  EmbeddingMetrics m0 = embedding_metrics(make_embedding(grid, base, base));
  CHECK(m0.j_norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m0.jstarj_defect <= 1e-12);

  for (int n : {2, 5, 10}) {
    auto dst = coeffs(constant(1.0 + 1.0 / n), constant(1.0), constant(0.0));
    EmbeddingMetrics mn = embedding_metrics(make_embedding(grid, base, dst));
    CHECK(mn.jstarj_defect == doctest::Approx(1.0 / n).epsilon(1e-11));
  }

  // w_dst/w_src = 1 + sin(x)/n: defect = max_i |sin(x_i)|/n
  const int n = 7;
  auto dst = coeffs([=](double x) { return 1.0 + std::sin(x) / n; }, constant(1.0), constant(0.0));
  EmbeddingMetrics mn = embedding_metrics(make_embedding(grid, base, dst));
  double oracle = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    oracle = std::max(oracle, std::abs(std::sin(grid.node(i))) / n);
  CHECK(mn.jstarj_defect == doctest::Approx(oracle).epsilon(1e-11));

  WeightedSpace other(Grid(0.0, 1.0, 25), std::vector<double>(25, 1.0));
  CHECK_THROWS_AS(make_embedding(space_for(grid, base), other), Error);
}

TEST_CASE("slnrc_family: deviations and hypothesis checks") {
  Grid grid(0.0, kPi, 50);
  auto limit = coeffs(constant(1.0), constant(1.0),
                      [](double x) { return x * x / (1.0 + x * x); }, 0.25, 0.0);

  // identity schedule: all deviations zero
  auto id_schedule = [&](int) { return limit; };
  auto fam0 = slnrc_family(grid, limit, id_schedule, {1, 2, 4});
  for (const auto& d : fam0.deviations()) {
    CHECK(d.w_ratio_sup == doctest::Approx(0.0));
    CHECK(d.p_ratio_sup == doctest::Approx(0.0));
    CHECK(d.q_cell_l1 == doctest::Approx(0.0));
  }

  // reference-style schedule
  auto schedule = [&](int n) {
    return coeffs([n](double x) { return 1.0 + std::sin(x) / n; }, constant(1.0),
                  [n, &limit](double x) { return limit.q(x) + std::exp(-double(n)) *
                                                  (x >= 0.0 && x < 1.0 ? 1.0 : 0.0); },
                  0.25, 0.0);
  };
  auto fam = slnrc_family(grid, limit, schedule, {1, 2, 4, 8});
  for (std::size_t i = 0; i < fam.indices().size(); ++i) {
    const int n = fam.indices()[i];
    double oracle = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      oracle = std::max(oracle, std::abs(std::sin(grid.node(k))) / n);
    for (std::size_t k = 0; k <= grid.size(); ++k)
      oracle = std::max(oracle, std::abs(std::sin(grid.midpoint(k))) / n);
    CHECK(fam.deviations()[i].w_ratio_sup == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(fam.deviations()[i].w_ratio_sup == doctest::Approx(1.0 / n).epsilon(1e-3));
    CHECK(fam.deviations()[i].q_cell_l1 == doctest::Approx(std::exp(-double(n))).epsilon(1e-9));
  }

  // dipping below delta raises HypothesisViolation
  auto bad = [&](int n) {
    return coeffs([n](double x) { return 0.1 + std::sin(x) / n; }, constant(1.0), limit.q, 0.25, 0.0);
  };
  try {
    slnrc_family(grid, limit, bad, {1, 2});
    FAIL("expected HypothesisViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HypothesisViolation);
  }

  // growing deviations rejected for the Slnrc kind, allowed for CustomPair
  auto growing = [&](int n) {
    return coeffs([n](double x) { return 1.0 + n * 0.01 * std::sin(x); }, constant(1.0), limit.q,
                  0.25, 0.0);
  };
  CHECK_THROWS_AS(slnrc_family(grid, limit, growing, {1, 2, 4}), Error);
  CHECK_NOTHROW(slnrc_family(grid, limit, growing, {1, 2, 4}, FamilyKind::CustomPair));
}

TEST_CASE("compact_cutoff_family: tail deviations") {
  const double big = 8.0 * kPi;
  Grid grid(-big, big, 160);
  auto c0 = coeffs([](double x) { return 1.0 + 1.0 / (1.0 + x * x); }, constant(1.0),
                   [](double x) { return std::exp(-std::abs(x)); }, 0.25, 0.0);
  auto cinf = coeffs(constant(1.0), constant(1.0), constant(0.0), 0.25, 0.0);

  // identical triples: constant family with zero deviations
  auto same = compact_cutoff_family(grid, cinf, cinf, {1, 2, 4});
  for (const auto& d : same.deviations()) {
    CHECK(d.w_ratio_sup == doctest::Approx(0.0));
    CHECK(d.q_cell_l1 == doctest::Approx(0.0));
  }

  auto fam = compact_cutoff_family(grid, c0, cinf, {1, 2, 4, 8});
  for (std::size_t i = 0; i < fam.indices().size(); ++i) {
    const int n = fam.indices()[i];
    // tail sup of 1/(1+x^2) over sample points beyond n
    double woracle = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (std::abs(grid.node(k)) > n)
        woracle = std::max(woracle, 1.0 / (1.0 + grid.node(k) * grid.node(k)));
    for (std::size_t k = 0; k <= grid.size(); ++k)
      if (std::abs(grid.midpoint(k)) > n)
        woracle = std::max(woracle, 1.0 / (1.0 + grid.midpoint(k) * grid.midpoint(k)));
    CHECK(fam.deviations()[i].w_ratio_sup == doctest::Approx(woracle).epsilon(1e-12));
    CHECK(fam.deviations()[i].w_ratio_sup <= 1.0 / (1.0 + n * n) + 1e-9);

    // tail q functional: int_n^{n+1} e^{-x} = e^{-n}(1 - e^{-1})
    const double expect = std::exp(-double(n)) * (1.0 - std::exp(-1.0));
    CHECK(fam.deviations()[i].q_cell_l1 == doctest::Approx(expect).epsilon(0.02));
  }

  // members agree with cinf inside and c0 outside
  auto member = fam.member(4);
  CHECK(member.w(1.0) == doctest::Approx(cinf.w(1.0)));
  CHECK(member.w(6.0) == doctest::Approx(c0.w(6.0)));
  CHECK(member.q(-7.0) == doctest::Approx(c0.q(-7.0)));
}
