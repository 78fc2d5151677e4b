#include "resolvlab/sturm.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace resolvlab::sturm {

namespace {

double sample_positive(const ScalarField& f, double x, const char* name) {
  const double v = f(x);
  if (!std::isfinite(v) || v <= 0.0)
    throw Error(ErrorKind::CoefficientSignViolation,
                std::string(name) + " must be positive, got " + std::to_string(v) +
                    " at x = " + std::to_string(x));
  return v;
}

double sample_finite(const ScalarField& f, double x, const char* name) {
  const double v = f(x);
  if (!std::isfinite(v))
    throw Error(ErrorKind::NonFiniteEntries,
                std::string(name) + " not finite at x = " + std::to_string(x));
  return v;
}

std::vector<double> node_samples_positive(const Grid& grid, const ScalarField& f, const char* name) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = sample_positive(f, grid.node(i), name);
  return out;
}

std::vector<double> midpoint_samples_positive(const Grid& grid, const ScalarField& f, const char* name) {
  std::vector<double> out(grid.size() + 1);
  for (std::size_t i = 0; i <= grid.size(); ++i) out[i] = sample_positive(f, grid.midpoint(i), name);
  return out;
}

}  // namespace

WeightedSpace space_for(const Grid& grid, const Coefficients& coeffs) {
  return WeightedSpace(grid, node_samples_positive(grid, coeffs.w, "w"));
}

SelfAdjointOp discretize(const SLProblem& prob) {
  const Grid& grid = prob.grid;
  const std::size_t m = grid.size();
  const double h = grid.spacing();
  const std::vector<double> pm = midpoint_samples_positive(grid, prob.coeffs.p, "p");
  WeightedSpace space = space_for(grid, prob.coeffs);

  DenseMatrix k(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double qi = sample_finite(prob.coeffs.q, grid.node(i), "q");
    k(i, i) = (pm[i] + pm[i + 1]) / h + qi * h;
    if (i + 1 < m) {
      k(i, i + 1) = -pm[i + 1] / h;
      k(i + 1, i) = -pm[i + 1] / h;
    }
  }
  return selfadj::from_form(std::move(space), std::move(k));
}

double form_value(const SLProblem& prob, std::span<const cxd> f) {
  const Grid& grid = prob.grid;
  const std::size_t m = grid.size();
  if (f.size() != m) throw Error(ErrorKind::DimensionMismatch, "form_value vector size");
  const double h = grid.spacing();

  double acc = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const cxd upper = (j < m) ? f[j] : cxd(0.0, 0.0);
    const cxd lower = (j > 0) ? f[j - 1] : cxd(0.0, 0.0);
    acc += sample_positive(prob.coeffs.p, grid.midpoint(j), "p") * std::norm(upper - lower) / h;
  }
  for (std::size_t i = 0; i < m; ++i)
    acc += sample_finite(prob.coeffs.q, grid.node(i), "q") * std::norm(f[i]) * h;
  return acc;
}

Factorization factorize(const SLProblem& prob) {
  const Grid& grid = prob.grid;
  const std::size_t m = grid.size();
  for (std::size_t i = 0; i < m; ++i)
    if (prob.coeffs.q(grid.node(i)) != 0.0)
      throw Error(ErrorKind::NonZeroPotential, "factorize requires q == 0");

  const double h = grid.spacing();
  DenseMatrix d(m + 1, m);
  for (std::size_t j = 0; j <= m; ++j) {
    if (j < m) d(j, j) = 1.0 / h;
    if (j > 0) d(j, j - 1) = -1.0 / h;
  }
  Grid staggered_grid(grid.a() - 0.5 * h, grid.b() + 0.5 * h, m + 1);
  WeightedSpace staggered(staggered_grid, midpoint_samples_positive(grid, prob.coeffs.p, "p"));
  return Factorization{std::move(d), std::move(staggered)};
}

double local_l1_bound(const ScalarField& q, double a, double b, double resolution) {
  if (!(a < b)) throw Error(ErrorKind::GridMismatch, "local_l1_bound requires a < b");
  if (!(resolution > 0.0)) throw Error(ErrorKind::GridMismatch, "resolution must be positive");
  double best = 0.0;
  for (double k = std::floor(a); k < b; k += 1.0) {
    const double lo = std::max(k, a);
    const double hi = std::min(k + 1.0, b);
    if (!(hi > lo)) continue;
    const auto nsub = static_cast<std::size_t>(std::ceil((hi - lo) / resolution));
    const double hs = (hi - lo) / static_cast<double>(nsub);
    double cell = 0.0;
    for (std::size_t i = 0; i < nsub; ++i)
      cell += std::abs(q(lo + (static_cast<double>(i) + 0.5) * hs));
    best = std::max(best, cell * hs);
  }
  return best;
}

QfreeReport qfree_check(const SLProblem& prob, double eps, std::size_t sample_count,
                        double slack, std::uint64_t seed) {
  const Grid& grid = prob.grid;
  const std::size_t m = grid.size();
  const double h = grid.spacing();
  const double bound = local_l1_bound(prob.coeffs.q, grid.a(), grid.b(), h);

  std::vector<double> qs(m), ws(m);
  for (std::size_t i = 0; i < m; ++i) {
    qs[i] = sample_finite(prob.coeffs.q, grid.node(i), "q");
    ws[i] = sample_positive(prob.coeffs.w, grid.node(i), "w");
  }
  std::vector<double> pm(m + 1);
  for (std::size_t j = 0; j <= m; ++j) pm[j] = sample_positive(prob.coeffs.p, grid.midpoint(j), "p");

  auto ratio_for = [&](std::span<const double> f) {
    double lhs = 0.0, wterm = 0.0, pterm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      lhs += std::abs(qs[i]) * f[i] * f[i] * h;
      wterm += ws[i] * f[i] * f[i] * h;
    }
    for (std::size_t j = 0; j <= m; ++j) {
      const double upper = (j < m) ? f[j] : 0.0;
      const double lower = (j > 0) ? f[j - 1] : 0.0;
      pterm += pm[j] * (upper - lower) * (upper - lower) / h;
    }
    const double rhs = bound * (eps * pterm + (1.0 + 1.0 / eps) * wterm);
    return rhs > 0.0 ? lhs / rhs : 0.0;
  };

  // fixed dictionary: low sine modes, then seeded localized bumps
  double worst = 0.0;
  std::size_t produced = 0;
  const double length = grid.b() - grid.a();
  std::vector<double> f(m);
  for (std::size_t k = 1; k <= std::min<std::size_t>(10, m) && produced < sample_count; ++k) {
    for (std::size_t i = 0; i < m; ++i)
      f[i] = std::sin(static_cast<double>(k) * std::numbers::pi * (grid.node(i) - grid.a()) / length);
    worst = std::max(worst, ratio_for(f));
    ++produced;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> center(grid.a(), grid.b());
  std::uniform_real_distribution<double> width(0.15, 1.2);
  while (produced < sample_count) {
    const double c = center(rng);
    const double s = width(rng);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = (grid.node(i) - c) / s;
      f[i] = std::exp(-t * t);
    }
    worst = std::max(worst, ratio_for(f));
    ++produced;
  }
  return QfreeReport{worst <= 1.0 + slack, worst};
}

Embedding make_embedding(const WeightedSpace& src, const WeightedSpace& dst) {
  if (!(src.grid() == dst.grid()))
    throw Error(ErrorKind::GridMismatch, "embedding requires a shared grid");
  return Embedding(src, dst, DenseMatrix::identity(src.dim()));
}

Embedding make_embedding(const Grid& grid, const Coefficients& src, const Coefficients& dst) {
  return make_embedding(space_for(grid, src), space_for(grid, dst));
}

namespace {

void check_hypotheses(const Grid& grid, const Coefficients& c, double delta, double gamma, int n) {
  auto fail = [&](const char* name, double v, double x) {
    throw Error(ErrorKind::HypothesisViolation,
                std::string(name) + " = " + std::to_string(v) + " at x = " + std::to_string(x) +
                    " (n = " + std::to_string(n) + ") violates the hypothesis bound");
  };
  auto check_point = [&](double x) {
    const double w = c.w(x), p = c.p(x), q = c.q(x);
    if (!std::isfinite(w) || w < delta) fail("w", w, x);
    if (!std::isfinite(p) || p < delta) fail("p", p, x);
    if (!std::isfinite(q) || q < gamma) fail("q", q, x);
  };
  for (std::size_t i = 0; i < grid.size(); ++i) check_point(grid.node(i));
  for (std::size_t j = 0; j <= grid.size(); ++j) check_point(grid.midpoint(j));
}

Deviations measure_deviations(const Grid& grid, const Coefficients& limit, const Coefficients& member) {
  Deviations dev;
  auto see = [&](double x) {
    dev.w_ratio_sup = std::max(dev.w_ratio_sup, std::abs(member.w(x) / limit.w(x) - 1.0));
    dev.p_ratio_sup = std::max(dev.p_ratio_sup, std::abs(member.p(x) / limit.p(x) - 1.0));
  };
  for (std::size_t i = 0; i < grid.size(); ++i) see(grid.node(i));
  for (std::size_t j = 0; j <= grid.size(); ++j) see(grid.midpoint(j));
  const ScalarField qlim = limit.q, qmem = member.q;
  dev.q_cell_l1 = local_l1_bound([qlim, qmem](double x) { return qmem(x) - qlim(x); },
                                 grid.a(), grid.b(), grid.spacing());
  return dev;
}

}  // namespace

CoefficientFamily::CoefficientFamily(FamilyKind kind, Grid grid, Coefficients limit,
                                     std::function<Coefficients(int)> schedule, std::vector<int> ns)
    : kind_(kind), grid_(grid), limit_(std::move(limit)), schedule_(std::move(schedule)),
      ns_(std::move(ns)) {
  if (ns_.empty())
    throw Error(ErrorKind::HypothesisViolation, "family requires a nonempty ascending index set");
  for (std::size_t i = 0; i + 1 < ns_.size(); ++i)
    if (ns_[i] >= ns_[i + 1])
      throw Error(ErrorKind::HypothesisViolation, "family indices must be strictly ascending");

  check_hypotheses(grid_, limit_, limit_.delta, limit_.gamma, 0);
  deviations_.reserve(ns_.size());
  for (int n : ns_) {
    const Coefficients c = schedule_(n);
    check_hypotheses(grid_, c, limit_.delta, limit_.gamma, n);
    deviations_.push_back(measure_deviations(grid_, limit_, c));
  }

  if (kind_ == FamilyKind::Slnrc) {
    for (std::size_t i = 0; i + 1 < deviations_.size(); ++i) {
      const Deviations& a = deviations_[i];
      const Deviations& b = deviations_[i + 1];
      const double tol = 1e-12;
      if (b.w_ratio_sup > a.w_ratio_sup + tol || b.p_ratio_sup > a.p_ratio_sup + tol ||
          b.q_cell_l1 > a.q_cell_l1 + tol)
        throw Error(ErrorKind::HypothesisViolation,
                    "deviation functionals must be non-increasing in n for this family kind");
    }
  }
}

CoefficientFamily slnrc_family(const Grid& grid, Coefficients limit,
                               std::function<Coefficients(int)> schedule, std::vector<int> ns,
                               FamilyKind kind) {
  return CoefficientFamily(kind, grid, std::move(limit), std::move(schedule), std::move(ns));
}

CoefficientFamily compact_cutoff_family(const Grid& grid, Coefficients c0, Coefficients cinf,
                                        std::vector<int> ns) {
  const double delta = std::min(c0.delta, cinf.delta);
  const double gamma = std::min(c0.gamma, cinf.gamma);
  Coefficients limit = cinf;
  limit.delta = delta;
  limit.gamma = gamma;
  auto schedule = [c0, cinf, delta, gamma](int n) {
    const double cut = static_cast<double>(n);
    Coefficients c;
    c.delta = delta;
    c.gamma = gamma;
    c.w = [w0 = c0.w, wi = cinf.w, cut](double x) { return std::abs(x) <= cut ? wi(x) : w0(x); };
    c.p = [p0 = c0.p, pi = cinf.p, cut](double x) { return std::abs(x) <= cut ? pi(x) : p0(x); };
    c.q = [q0 = c0.q, qi = cinf.q, cut](double x) { return std::abs(x) <= cut ? qi(x) : q0(x); };
    return c;
  };
  return CoefficientFamily(FamilyKind::CompactCutoff, grid, std::move(limit), schedule,
                           std::move(ns));
}

}  // namespace resolvlab::sturm
