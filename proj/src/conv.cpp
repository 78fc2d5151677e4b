#include "resolvlab/conv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace resolvlab::conv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wnorm_on(const DenseMatrix& m, const wspace::WeightedSpace& src,
                const wspace::WeightedSpace& dst) {
  return wspace::weighted_op_norm(m, src, dst);
}

std::vector<double> windowed(const std::vector<double>& values, const SpectrumWindow& win) {
  std::vector<double> out;
  for (double v : values)
    if (v > win.lo && v < win.hi) out.push_back(v);
  return out;
}

double set_distance(double x, const std::vector<double>& set) {
  double best = kInf;
  for (double s : set) best = std::min(best, std::abs(x - s));
  return best;
}

}  // namespace

ConvergencePair::ConvergencePair(std::shared_ptr<const SelfAdjointOp> limit_op,
                                 std::shared_ptr<const SelfAdjointOp> approx_op, Embedding j_in)
    : limit(std::move(limit_op)), approx(std::move(approx_op)), j(std::move(j_in)),
      jstar(wspace::adjoint_map(j)) {
  if (!(j.src == limit->space()))
    throw Error(ErrorKind::DimensionMismatch, "embedding source must be the limit space");
  if (!(j.dst == approx->space()))
    throw Error(ErrorKind::DimensionMismatch, "embedding target must be the approximant space");
}

double nrc_distance(const ConvergencePair& pair, cxd z) {
  const DenseMatrix rn = selfadj::resolvent(*pair.approx, z);
  const DenseMatrix r = selfadj::resolvent(*pair.limit, z);
  DenseMatrix d = pair.jstar * (rn * pair.j.map);
  d -= r;
  return wnorm_on(d, pair.limit->space(), pair.limit->space());
}

double nrc_distance_alt(const ConvergencePair& pair, cxd z) {
  const DenseMatrix rn = selfadj::resolvent(*pair.approx, z);
  const DenseMatrix r = selfadj::resolvent(*pair.limit, z);
  DenseMatrix d = rn * pair.j.map;
  d -= pair.j.map * r;
  return wnorm_on(d, pair.limit->space(), pair.approx->space());
}

StrongResiduals src_residuals(const ConvergencePair& pair, cxd z,
                              std::span<const std::vector<cxd>> test_set) {
  const DenseMatrix rn = selfadj::resolvent(*pair.approx, z);
  const DenseMatrix r = selfadj::resolvent(*pair.limit, z);
  const EmbeddingMetrics metrics = wspace::embedding_metrics(pair.j);
  const double jstar_norm = metrics.j_norm;   // ||J*|| = ||J||

  StrongResiduals out;
  for (const auto& psi : test_set) {
    const auto jpsi = numlin::apply(pair.j.map, psi);
    const auto rpsi = numlin::apply(r, psi);
    const auto rnjpsi = numlin::apply(rn, jpsi);

    std::vector<cxd> pull = numlin::apply(pair.jstar, rnjpsi);
    for (std::size_t i = 0; i < pull.size(); ++i) pull[i] -= rpsi[i];
    const double pull_res = pair.limit->space().norm(pull);

    std::vector<cxd> inter = rnjpsi;
    const auto jrpsi = numlin::apply(pair.j.map, rpsi);
    for (std::size_t i = 0; i < inter.size(); ++i) inter[i] -= jrpsi[i];
    const double inter_res = pair.approx->space().norm(inter);

    out.pullback.push_back(pull_res);
    out.intertwine.push_back(inter_res);
    out.dominated.push_back(pull_res <= jstar_norm * inter_res +
                                            metrics.jstarj_defect *
                                                pair.limit->space().norm(rpsi) +
                                            1e-10);
  }
  return out;
}

FcalcDistance fcalc_distance(const ConvergencePair& pair, const std::function<cxd(double)>& f,
                             Mode mode, std::span<const std::vector<cxd>> test_set) {
  const DenseMatrix fn = selfadj::func_calc(*pair.approx, f);
  const DenseMatrix fa = selfadj::func_calc(*pair.limit, f);
  FcalcDistance out;
  if (mode == Mode::Norm) {
    DenseMatrix pulled = pair.jstar * (fn * pair.j.map);
    pulled -= fa;
    const double d1 = wnorm_on(pulled, pair.limit->space(), pair.limit->space());
    const wspace::JInverse jinv = wspace::j_inverse(pair.j);   // NotInvertible propagates
    DenseMatrix inv_pulled = jinv.inverse * (fn * pair.j.map);
    inv_pulled -= fa;
    const double d2 = wnorm_on(inv_pulled, pair.limit->space(), pair.limit->space());
    out.norm_distance = std::max(d1, d2);
    return out;
  }
  const DenseMatrix pulled = pair.jstar * (fn * pair.j.map);
  for (const auto& psi : test_set) {
    auto diff = numlin::apply(pulled, psi);
    const auto fapsi = numlin::apply(fa, psi);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= fapsi[i];
    out.residuals.push_back(pair.limit->space().norm(diff));
  }
  return out;
}

SemigroupDistance semigroup_distance(const ConvergencePair& pair, double t, SemigroupKind kind,
                                     Mode mode, std::span<const std::vector<cxd>> test_set) {
  SemigroupDistance out;
  out.lower_bound_limit = selfadj::lower_bound(*pair.limit);
  out.lower_bound_approx = selfadj::lower_bound(*pair.approx);

  const auto group = [&](const SelfAdjointOp& op) {
    return kind == SemigroupKind::Unitary ? selfadj::unitary_group(op, t)
                                          : selfadj::heat_semigroup(op, t);
  };
  const DenseMatrix gn = group(*pair.approx);
  const DenseMatrix ga = group(*pair.limit);
  DenseMatrix pulled = pair.jstar * (gn * pair.j.map);

  if (mode == Mode::Norm) {
    DenseMatrix d = pulled;
    d -= ga;
    out.norm_distance = wnorm_on(d, pair.limit->space(), pair.limit->space());
    return out;
  }
  for (const auto& psi : test_set) {
    auto diff = numlin::apply(pulled, psi);
    const auto gapsi = numlin::apply(ga, psi);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= gapsi[i];
    out.residuals.push_back(pair.limit->space().norm(diff));
  }
  return out;
}

RelboundCertificate relbound_certificate(const ConvergencePair& pair) {
  const DenseMatrix a = pair.limit->action();
  const DenseMatrix an = pair.approx->action();
  const DenseMatrix damp = selfadj::func_calc(
      *pair.limit, [](double t) { return cxd(1.0 / std::sqrt(1.0 + t * t), 0.0); });

  DenseMatrix commutator = an * pair.j.map;
  commutator -= pair.j.map * a;
  const DenseMatrix damped = commutator * damp;

  RelboundCertificate out;
  out.certificate = wnorm_on(damped, pair.limit->space(), pair.approx->space());
  out.nrc_i = nrc_distance(pair, cxd(0.0, 1.0));
  out.bound_ok = out.nrc_i <= 2.0 * out.certificate + 1e-10;
  return out;
}

double form_delta(const ConvergencePair& pair, double gamma) {
  const std::size_t m = pair.limit->dim();
  DenseMatrix delta = pair.j.map.adjoint() * (pair.approx->form_matrix() * pair.j.map);
  delta -= pair.limit->form_matrix();
  // symmetrize rounding noise from the triple product
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m; ++k) {
      const cxd sym = 0.5 * (delta(i, k) + std::conj(delta(k, i)));
      delta(i, k) = sym;
      delta(k, i) = std::conj(sym);
    }

  DenseMatrix denom = pair.limit->form_matrix();
  for (std::size_t i = 0; i < m; ++i)
    denom(i, i) += (1.0 - gamma) * pair.limit->space().mass()[i];

  const DenseMatrix l = numlin::cholesky(denom);   // NotPositiveDefinite when gamma too large
  DenseMatrix b = numlin::forward_subst(l, delta);
  b = numlin::forward_subst(l, b.adjoint());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m; ++k) {
      const cxd sym = 0.5 * (b(i, k) + std::conj(b(k, i)));
      b(i, k) = sym;
      b(k, i) = std::conj(sym);
    }
  const auto values = numlin::eigh(b, false).values;
  double rho = 0.0;
  for (double v : values) rho = std::max(rho, std::abs(v));
  return rho;
}

SelfAdjointOp sandwich_operator(const ConvergencePair& pair) {
  const std::size_t m = pair.limit->dim();
  DenseMatrix form = pair.j.map.adjoint() * (pair.approx->form_matrix() * pair.j.map);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i; k < m; ++k) {
      const cxd sym = 0.5 * (form(i, k) + std::conj(form(k, i)));
      form(i, k) = sym;
      form(k, i) = std::conj(sym);
    }
  return selfadj::from_form(pair.limit->space(), std::move(form));
}

double spectra_inclusion_gap(const ConvergencePair& pair, const SpectrumWindow& win) {
  const std::vector<double> sel = windowed(pair.limit->eigenvalues(), win);
  double worst = 0.0;
  for (double lam : sel) worst = std::max(worst, set_distance(lam, pair.approx->eigenvalues()));
  return worst;
}

double spectra_hausdorff(const ConvergencePair& pair, const SpectrumWindow& win) {
  const std::vector<double> a = windowed(pair.limit->eigenvalues(), win);
  const std::vector<double> b = windowed(pair.approx->eigenvalues(), win);
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  double worst = 0.0;
  for (double x : a) worst = std::max(worst, set_distance(x, b));
  for (double x : b) worst = std::max(worst, set_distance(x, a));
  return worst;
}

ProjectionDiagnostics projection_diagnostics(const ConvergencePair& pair, const SpectrumWindow& win,
                                             std::span<const std::vector<cxd>> test_set) {
  const selfadj::Projection pa = selfadj::spectral_projection(*pair.limit, win);
  const selfadj::Projection pn = selfadj::spectral_projection(*pair.approx, win);
  const DenseMatrix pulled = pair.jstar * (pn.matrix * pair.j.map);

  ProjectionDiagnostics out;
  out.rank_limit = pa.rank;
  out.rank_approx = pn.rank;
  const EmbeddingMetrics metrics = wspace::embedding_metrics(pair.j);
  out.rank_inequality_ok =
      static_cast<double>(pa.rank) <=
      metrics.j_norm * metrics.j_norm * static_cast<double>(pn.rank) + 1e-9;
  for (const auto& psi : test_set) {
    auto diff = numlin::apply(pulled, psi);
    const auto papsi = numlin::apply(pa.matrix, psi);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= papsi[i];
    out.residuals.push_back(pair.limit->space().norm(diff));
  }
  return out;
}

std::size_t ess_window_count(const SelfAdjointOp& op, double lambda, double eps) {
  if (!(eps > 0.0))
    throw Error(ErrorKind::EndpointCollision, "window halfwidth must be positive");
  const SpectrumWindow win{lambda - eps, lambda + eps, 0.0};
  const double guard = selfadj::endpoint_guard(op, win);
  std::size_t count = 0;
  for (double v : op.eigenvalues()) {
    if (std::abs(v - win.lo) < guard || std::abs(v - win.hi) < guard)
      throw Error(ErrorKind::EndpointCollision, "eigenvalue within guard of a window endpoint");
    if (v > win.lo && v < win.hi) ++count;
  }
  return count;
}

WeakResiduals weak_residuals(const ConvergencePair& pair, cxd z,
                             std::span<const std::pair<std::vector<cxd>, std::vector<cxd>>> probes) {
  if (z.imag() == 0.0)
    throw Error(ErrorKind::RealSpectralParameter, "weak residuals require a non-real z");
  const DenseMatrix rn = selfadj::resolvent(*pair.approx, z);
  const DenseMatrix r = selfadj::resolvent(*pair.limit, z);
  DenseMatrix d = pair.jstar * (rn * pair.j.map);
  d -= r;

  WeakResiduals out;
  for (const auto& [phi, psi] : probes) {
    const auto dpsi = numlin::apply(d, psi);
    out.weak.push_back(std::abs(pair.limit->space().inner(phi, dpsi)));
    out.strong.push_back(pair.limit->space().norm(dpsi));
  }
  return out;
}

EquivalenceAudit equivalence_audit(const ConvergencePair& pair, cxd z, double slack) {
  EquivalenceAudit out;
  out.nrc = nrc_distance(pair, z);
  out.nrc_alt = nrc_distance_alt(pair, z);
  const EmbeddingMetrics metrics = wspace::embedding_metrics(pair.j);
  // resolvent norms of self-adjoint operators are exactly 1/dist(z, spectrum)
  const double r_norm = 1.0 / pair.limit->spectral_gap(z);
  const double rn_norm = 1.0 / pair.approx->spectral_gap(z);
  out.bound_nrc = metrics.j_norm * out.nrc_alt + metrics.jstarj_defect * r_norm;
  out.bound_nrc_alt =
      metrics.j_norm * out.nrc + metrics.jjstar_defect * rn_norm * metrics.j_norm;
  out.within = out.nrc <= out.bound_nrc + slack && out.nrc_alt <= out.bound_nrc_alt + slack;
  return out;
}

ZIndependenceAudit z_independence_audit(const ConvergencePair& pair, cxd z_ref,
                                        double nrc_alt_ref, cxd z, double slack) {
  ZIndependenceAudit out;
  out.z = z;
  out.nrc = nrc_distance(pair, z);
  out.nrc_alt = nrc_distance_alt(pair, z);
  const double shift = std::abs(z - z_ref);
  const double rn_norm = 1.0 / pair.approx->spectral_gap(z);
  const double r_norm = 1.0 / pair.limit->spectral_gap(z);
  out.bound = (1.0 + shift * rn_norm) * nrc_alt_ref * (1.0 + shift * r_norm);
  out.within = out.nrc_alt <= out.bound + slack;
  return out;
}

SandwichAudit sandwich_audit(const ConvergencePair& pair, double gamma, double lambda,
                             double slack) {
  SandwichAudit out;
  out.rho = form_delta(pair, gamma);
  if (!(lambda > -gamma)) return out;
  out.rho_lambda = out.rho * std::max(1.0, 1.0 / (lambda + gamma));
  if (out.rho_lambda >= 1.0) return out;
  out.applicable = true;

  const SelfAdjointOp sandwich = sandwich_operator(pair);
  const cxd minus_lambda(-lambda, 0.0);
  DenseMatrix diff = selfadj::resolvent(sandwich, minus_lambda);
  diff -= selfadj::resolvent(*pair.limit, minus_lambda);
  out.lhs = wnorm_on(diff, pair.limit->space(), pair.limit->space());
  const double r_norm = 1.0 / pair.limit->spectral_gap(minus_lambda);
  out.rhs = r_norm * out.rho_lambda / (1.0 - out.rho_lambda);
  out.within = out.lhs <= out.rhs + slack;
  return out;
}

}  // namespace resolvlab::conv
