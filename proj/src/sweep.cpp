#include "resolvlab/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace resolvlab::expcli {

namespace {

using numlin::DenseMatrix;
using selfadj::SelfAdjointOp;
using wspace::WeightedSpace;

const cxd kI(0.0, 1.0);

std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Limit-side objects shared read-only by all row workers.
struct LimitSide {
  std::shared_ptr<const SelfAdjointOp> op;
  std::vector<std::vector<cxd>> dictionary;
  DenseMatrix r_i;                        // R_A(i)
  std::vector<DenseMatrix> f_limit;       // per fcalc function
  DenseMatrix f_conj_limit;               // conj(res_i) applied to A
  DenseMatrix res_i_limit;                // res_i applied to A
  std::vector<DenseMatrix> heat_limit;    // per times_heat
  std::vector<DenseMatrix> uni_limit;     // per times_unitary
  DenseMatrix damp;                       // (A^2 + I)^{-1/2}
  DenseMatrix a_action;
  DenseMatrix chol;                       // cholesky(K - gamma W + W)
  DenseMatrix r_sandwich;                 // R_A(-sandwich_lambda)
  std::optional<selfadj::Projection> projection;
  std::vector<cxd> audit_z;               // z_list entries other than i
};

LimitSide build_limit_side(const Scenario& s) {
  LimitSide side;
  const wspace::Grid grid = s.grid();
  side.op = std::make_shared<SelfAdjointOp>(
      sturm::discretize({grid, s.family->limit()}));
  side.dictionary = wspace::make_test_dictionary(side.op->space(), 10, 10, s.seed);
  side.r_i = selfadj::resolvent(*side.op, kI);
  for (const std::string& name : s.fcalc_names)
    side.f_limit.push_back(selfadj::func_calc(*side.op, fcalc_function(name).fn));
  const auto& res_i = fcalc_function("res_i").fn;
  side.res_i_limit = selfadj::func_calc(*side.op, res_i);
  side.f_conj_limit =
      selfadj::func_calc(*side.op, [&](double t) { return std::conj(res_i(t)); });
  for (double t : s.times_heat) side.heat_limit.push_back(selfadj::heat_semigroup(*side.op, t));
  for (double t : s.times_unitary) side.uni_limit.push_back(selfadj::unitary_group(*side.op, t));
  side.damp = selfadj::func_calc(*side.op,
                                 [](double t) { return cxd(1.0 / std::sqrt(1.0 + t * t), 0.0); });
  side.a_action = side.op->action();

  DenseMatrix denom = side.op->form_matrix();
  for (std::size_t i = 0; i < denom.rows(); ++i)
    denom(i, i) += (1.0 - s.gamma) * side.op->space().mass()[i];
  side.chol = numlin::cholesky(denom);

  side.r_sandwich = selfadj::resolvent(*side.op, cxd(-s.sandwich_lambda, 0.0));
  if (s.proj_window)
    side.projection = selfadj::spectral_projection(*side.op, *s.proj_window);
  for (cxd z : s.z_list)
    if (z != kI) side.audit_z.push_back(z);
  return side;
}

// J is the identity map between weight spaces over one grid, so J* acts by
// row scaling with the mass ratio and J^{-1} is again the identity map.
struct RowJob {
  const Scenario* scenario = nullptr;
  const LimitSide* side = nullptr;
  int n = 0;
  bool last_row = false;
  bool timing = false;
};

std::pair<conv::ConvergenceReport, RowExtras> compute_row(const RowJob& job) {
  const auto start = std::chrono::steady_clock::now();
  const Scenario& s = *job.scenario;
  const LimitSide& side = *job.side;
  const SelfAdjointOp& a = *side.op;
  const WeightedSpace& h = a.space();
  const std::size_t dim = h.dim();

  const sturm::Coefficients member = s.family->member(job.n);
  const SelfAdjointOp an = sturm::discretize({s.grid(), member});
  const WeightedSpace& hn = an.space();

  std::vector<double> ratio(dim);   // mass_n / mass = w_n / w, the diagonal of J*
  for (std::size_t i = 0; i < dim; ++i) ratio[i] = hn.mass()[i] / h.mass()[i];
  auto pulled = [&](const DenseMatrix& x) {
    DenseMatrix out = x;
    out.scale_rows(ratio);
    return out;
  };

  conv::ConvergenceReport row;
  RowExtras extras;
  row.family_index = job.n;
  row.dim = dim;
  row.min_eig_limit = selfadj::lower_bound(a);
  row.min_eig_approx = selfadj::lower_bound(an);

  // embedding metrics of the identity map are exact diagonal quantities
  double jnorm2 = 0.0, defect = 0.0;
  for (double r : ratio) {
    jnorm2 = std::max(jnorm2, r);
    defect = std::max(defect, std::abs(r - 1.0));
  }
  row.metrics.j_norm = std::sqrt(jnorm2);
  row.metrics.jstarj_defect = defect;
  row.metrics.jjstar_defect = defect;

  // resolvent distances at the reporting parameter z = i
  const DenseMatrix rn_i = selfadj::resolvent(an, kI);
  DenseMatrix d = pulled(rn_i);
  d -= side.r_i;
  row.nrc = wspace::weighted_op_norm(d, h, h);
  DenseMatrix e = rn_i;
  e -= side.r_i;
  row.nrc_alt = wspace::weighted_op_norm(e, h, hn);

  // strong residuals over the dictionary
  const DenseMatrix pulled_rn = pulled(rn_i);
  for (const auto& psi : side.dictionary) {
    auto diff = numlin::apply(pulled_rn, psi);
    const auto rpsi = numlin::apply(side.r_i, psi);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= rpsi[i];
    row.src_max = std::max(row.src_max, h.norm(diff));
  }

  // equivalence bounds between the two distance flavors
  extras.equivalence.nrc = row.nrc;
  extras.equivalence.nrc_alt = row.nrc_alt;
  const double r_norm = 1.0 / a.spectral_gap(kI);
  const double rn_norm = 1.0 / an.spectral_gap(kI);
  extras.equivalence.bound_nrc = row.metrics.j_norm * row.nrc_alt +
                                 row.metrics.jstarj_defect * r_norm;
  extras.equivalence.bound_nrc_alt = row.metrics.j_norm * row.nrc +
                                     row.metrics.jjstar_defect * rn_norm * row.metrics.j_norm;
  extras.equivalence.within =
      row.nrc <= extras.equivalence.bound_nrc + s.equiv_slack &&
      row.nrc_alt <= extras.equivalence.bound_nrc_alt + s.equiv_slack;

  // z-independence audits against the reference parameter i
  for (cxd z : side.audit_z) {
    conv::ZIndependenceAudit audit;
    audit.z = z;
    const DenseMatrix rn_z = selfadj::resolvent(an, z);
    const DenseMatrix r_z = selfadj::resolvent(a, z);
    DenseMatrix dz = pulled(rn_z);
    dz -= r_z;
    audit.nrc = wspace::weighted_op_norm(dz, h, h);
    DenseMatrix ez = rn_z;
    ez -= r_z;
    audit.nrc_alt = wspace::weighted_op_norm(ez, h, hn);
    const double shift = std::abs(z - kI);
    audit.bound = (1.0 + shift / an.spectral_gap(z)) * row.nrc_alt *
                  (1.0 + shift / a.spectral_gap(z));
    audit.within = audit.nrc_alt <= audit.bound + s.equiv_slack;
    extras.z_audits.push_back(audit);
  }

  // functional-calculus distances
  for (std::size_t k = 0; k < s.fcalc_names.size(); ++k) {
    const FcalcFunction& f = fcalc_function(s.fcalc_names[k]);
    const DenseMatrix fn = selfadj::func_calc(an, f.fn);
    double value = 0.0;
    if (f.norm_mode) {
      DenseMatrix d1 = pulled(fn);
      d1 -= side.f_limit[k];
      DenseMatrix d2 = fn;   // J^{-1} f(A_n) J with the identity map
      d2 -= side.f_limit[k];
      value = std::max(wspace::weighted_op_norm(d1, h, h),
                       wspace::weighted_op_norm(d2, h, h));
    } else {
      const DenseMatrix pf = pulled(fn);
      for (const auto& psi : side.dictionary) {
        auto diff = numlin::apply(pf, psi);
        const auto fpsi = numlin::apply(side.f_limit[k], psi);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= fpsi[i];
        value = std::max(value, h.norm(diff));
      }
    }
    row.fcalc.emplace_back(s.fcalc_names[k], value);
  }

  if (job.last_row) {
    // quadratic form against the assembled matrix on a few dictionary vectors
    const sturm::SLProblem member_prob{s.grid(), member};
    double worst = 0.0;
    for (std::size_t k = 0; k < std::min<std::size_t>(5, side.dictionary.size()); ++k) {
      const auto& psi = side.dictionary[k];
      const double fv = sturm::form_value(member_prob, psi);
      const auto kpsi = numlin::apply(an.form_matrix(), psi);
      cxd quad(0.0, 0.0);
      for (std::size_t i = 0; i < psi.size(); ++i) quad += std::conj(psi[i]) * kpsi[i];
      worst = std::max(worst, std::abs(fv - quad.real()) / std::max(1.0, std::abs(fv)));
    }
    extras.form_consistency_gap = worst;

    // star-compatibility: the norm distance for res_i and its conjugate agree
    const auto& res_i = fcalc_function("res_i").fn;
    DenseMatrix d1 = pulled(selfadj::func_calc(an, res_i));
    d1 -= side.res_i_limit;
    DenseMatrix d2 = pulled(selfadj::func_calc(an, [&](double t) { return std::conj(res_i(t)); }));
    d2 -= side.f_conj_limit;
    extras.fcalc_conj_gap = std::abs(wspace::weighted_op_norm(d1, h, h) -
                                     wspace::weighted_op_norm(d2, h, h));
  }

  // semigroup distances
  for (std::size_t k = 0; k < s.times_heat.size(); ++k) {
    DenseMatrix hn_t = pulled(selfadj::heat_semigroup(an, s.times_heat[k]));
    hn_t -= side.heat_limit[k];
    extras.heat_norm.push_back(wspace::weighted_op_norm(hn_t, h, h));
  }
  for (std::size_t k = 0; k < s.times_unitary.size(); ++k) {
    const DenseMatrix un = pulled(selfadj::unitary_group(an, s.times_unitary[k]));
    double worst = 0.0;
    for (const auto& psi : side.dictionary) {
      auto diff = numlin::apply(un, psi);
      const auto upsi = numlin::apply(side.uni_limit[k], psi);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= upsi[i];
      worst = std::max(worst, h.norm(diff));
    }
    extras.unitary_strong_max.push_back(worst);
  }

  // relative-bound certificate c_n = ||(A_n J - J A)(A^2 + I)^{-1/2}||
  DenseMatrix commutator = an.action();
  commutator -= side.a_action;
  const DenseMatrix damped = commutator * side.damp;
  row.relbound_cert = wspace::weighted_op_norm(damped, h, hn);
  extras.relbound_ok = row.nrc <= 2.0 * row.relbound_cert + s.relbound_slack;

  // form criterion: pencil (K_n - K, K - gamma W + W)
  {
    DenseMatrix delta = an.form_matrix();
    delta -= a.form_matrix();
    DenseMatrix b = numlin::forward_subst(side.chol, delta);
    b = numlin::forward_subst(side.chol, b.adjoint());
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k2 = i; k2 < dim; ++k2) {
        const cxd sym = 0.5 * (b(i, k2) + std::conj(b(k2, i)));
        b(i, k2) = sym;
        b(k2, i) = std::conj(sym);
      }
    double rho = 0.0;
    for (double v : numlin::eigh(b, false).values) rho = std::max(rho, std::abs(v));
    row.form_delta = rho;
  }

  // sandwich-resolvent inequality at -sandwich_lambda
  extras.sandwich.rho = row.form_delta;
  extras.sandwich.rho_lambda =
      row.form_delta * std::max(1.0, 1.0 / (s.sandwich_lambda + s.gamma));
  if (extras.sandwich.rho_lambda < 1.0) {
    extras.sandwich.applicable = true;
    const SelfAdjointOp sandwich = selfadj::from_form(h, an.form_matrix());
    DenseMatrix diff = selfadj::resolvent(sandwich, cxd(-s.sandwich_lambda, 0.0));
    diff -= side.r_sandwich;
    extras.sandwich.lhs = wspace::weighted_op_norm(diff, h, h);
    extras.sandwich.rhs = (1.0 / a.spectral_gap(cxd(-s.sandwich_lambda, 0.0))) *
                          extras.sandwich.rho_lambda / (1.0 - extras.sandwich.rho_lambda);
    extras.sandwich.within = extras.sandwich.lhs <= extras.sandwich.rhs + s.sandwich_slack;
  }

  // spectra in the report window
  {
    auto windowed = [&](const std::vector<double>& vals) {
      std::vector<double> out;
      for (double v : vals)
        if (v > s.window.lo && v < s.window.hi) out.push_back(v);
      return out;
    };
    const std::vector<double> sa = windowed(a.eigenvalues());
    const std::vector<double> sn = windowed(an.eigenvalues());
    auto dist_to = [](double x, const std::vector<double>& set) {
      double best = std::numeric_limits<double>::infinity();
      for (double v : set) best = std::min(best, std::abs(x - v));
      return best;
    };
    if (sa.empty() && sn.empty()) row.hausdorff = 0.0;
    else if (sa.empty() || sn.empty()) row.hausdorff = std::numeric_limits<double>::infinity();
    else {
      double worst = 0.0;
      for (double v : sa) worst = std::max(worst, dist_to(v, sn));
      for (double v : sn) worst = std::max(worst, dist_to(v, sa));
      row.hausdorff = worst;
    }
    for (double v : sa)
      extras.inclusion_gap = std::max(extras.inclusion_gap, dist_to(v, an.eigenvalues()));
  }

  // projection diagnostics in the isolating window
  if (s.proj_window) {
    extras.has_projection = true;
    const selfadj::Projection pn = selfadj::spectral_projection(an, *s.proj_window);
    extras.proj_rank_limit = side.projection->rank;
    extras.proj_rank_approx = pn.rank;
    extras.proj_rank_inequality_ok =
        static_cast<double>(side.projection->rank) <=
        jnorm2 * static_cast<double>(pn.rank) + 1e-9;
    const DenseMatrix pp = pulled(pn.matrix);
    for (const auto& psi : side.dictionary) {
      auto diff = numlin::apply(pp, psi);
      const auto ppsi = numlin::apply(side.projection->matrix, psi);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= ppsi[i];
      extras.proj_residual_max = std::max(extras.proj_residual_max, h.norm(diff));
    }
  }

  if (job.timing) {
    const auto stop = std::chrono::steady_clock::now();
    row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  return {std::move(row), std::move(extras)};
}

double column_value(const conv::ConvergenceReport& row, const std::string& col) {
  if (col == "n") return static_cast<double>(row.family_index);
  if (col == "dim") return static_cast<double>(row.dim);
  if (col == "j_norm") return row.metrics.j_norm;
  if (col == "jstarj_defect") return row.metrics.jstarj_defect;
  if (col == "jjstar_defect") return row.metrics.jjstar_defect;
  if (col == "nrc_i") return row.nrc;
  if (col == "nrc_alt_i") return row.nrc_alt;
  if (col == "src_max") return row.src_max;
  if (col == "hausdorff") return row.hausdorff;
  if (col == "relbound_cert") return row.relbound_cert;
  if (col == "form_delta") return row.form_delta;
  if (col == "min_eig_A") return row.min_eig_limit;
  if (col == "min_eig_An") return row.min_eig_approx;
  if (col == "runtime_ms") return row.runtime_ms;
  for (const auto& [name, value] : row.fcalc)
    if (col == "fcalc_" + name) return value;
  throw Error(ErrorKind::SchemaError, "unknown column '" + col + "'");
}

std::string sequence_summary(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_short(v[i]);
  }
  return out + "]";
}

void append_configured_verdicts(const Scenario& s, const std::vector<conv::ConvergenceReport>& rows,
                                std::vector<Verdict>& verdicts) {
  auto column = [&](const std::string& col) {
    std::vector<double> v;
    for (const auto& row : rows) v.push_back(column_value(row, col));
    return v;
  };

  for (const std::string& col : s.verdicts.decreasing) {
    const std::vector<double> v = column(col);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) ok = ok && v[i + 1] < v[i];
    verdicts.push_back({"decreasing_" + col, ok, sequence_summary(v)});
  }
  for (const std::string& col : s.verdicts.trend_decreasing) {
    const std::vector<double> v = column(col);
    bool ok = !v.empty() && v.back() < v.front();
    for (double x : v) ok = ok && x <= v.front();
    verdicts.push_back({"trend_" + col, ok, sequence_summary(v)});
  }
  for (const auto& [col, range] : s.verdicts.slope) {
    const std::vector<double> v = column(col);
    bool valid = v.size() >= 2;
    for (double x : v) valid = valid && x > 0.0 && std::isfinite(x);
    double slope = 0.0;
    if (valid) {
      // least squares of log(value) against log(1/n)
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      const double count = static_cast<double>(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = std::log(1.0 / rows[i].family_index);
        const double y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    }
    const bool ok = valid && slope >= range.first && slope <= range.second;
    verdicts.push_back({"slope_" + col, ok,
                        "slope=" + fmt_short(slope) + " window=[" + fmt_short(range.first) + ", " +
                            fmt_short(range.second) + "]"});
  }
  for (const auto& [col, ratio] : s.verdicts.final_ratio) {
    const std::vector<double> v = column(col);
    const bool ok = !v.empty() && v.back() < ratio * v.front();
    verdicts.push_back({"final_ratio_" + col, ok,
                        "final=" + fmt_short(v.empty() ? 0.0 : v.back()) +
                            " initial=" + fmt_short(v.empty() ? 0.0 : v.front()) +
                            " ratio_limit=" + fmt_short(ratio)});
  }
  for (const auto& [col, threshold] : s.verdicts.final_below) {
    const std::vector<double> v = column(col);
    const bool ok = !v.empty() && v.back() < threshold;
    verdicts.push_back({"final_below_" + col, ok,
                        "final=" + fmt_short(v.empty() ? 0.0 : v.back()) + " threshold=" +
                            fmt_short(threshold)});
  }
}

void append_builtin_verdicts(const Scenario& s, const std::vector<conv::ConvergenceReport>& rows,
                             const std::vector<RowExtras>& extras, std::vector<Verdict>& verdicts) {
  // triangle bounds between the two distance flavors, every row
  {
    bool ok = true;
    double worst = 0.0;
    for (const RowExtras& e : extras) {
      ok = ok && e.equivalence.within;
      worst = std::max(worst, std::max(e.equivalence.nrc - e.equivalence.bound_nrc,
                                       e.equivalence.nrc_alt - e.equivalence.bound_nrc_alt));
    }
    verdicts.push_back({"equiv_bounds", ok, "max_excess=" + fmt_short(worst)});
  }
  // relative-bound certificate, every row
  {
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ok = ok && extras[i].relbound_ok;
      worst = std::max(worst, rows[i].nrc - 2.0 * rows[i].relbound_cert);
    }
    verdicts.push_back({"relbound", ok, "max_excess=" + fmt_short(worst)});
  }
  // sandwich-resolvent inequality on applicable rows
  {
    bool ok = true;
    bool any = false;
    double worst = -std::numeric_limits<double>::infinity();
    for (const RowExtras& e : extras) {
      if (!e.sandwich.applicable) continue;
      any = true;
      ok = ok && e.sandwich.within;
      worst = std::max(worst, e.sandwich.lhs - e.sandwich.rhs);
    }
    verdicts.push_back({"sandwich", ok,
                        any ? "max_excess=" + fmt_short(worst) : "not applicable (rho >= 1)"});
  }
  // z-independence transport bounds
  if (!extras.empty() && !extras.front().z_audits.empty()) {
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (const RowExtras& e : extras)
      for (const auto& audit : e.z_audits) {
        ok = ok && audit.within;
        worst = std::max(worst, audit.nrc_alt - audit.bound);
      }
    verdicts.push_back({"z_independence", ok, "max_excess=" + fmt_short(worst)});
  }
  // star-compatibility of the functional calculus on the last row
  if (!extras.empty() && extras.back().fcalc_conj_gap) {
    const double gap = *extras.back().fcalc_conj_gap;
    verdicts.push_back({"fcalc_conj", gap <= 1e-10, "gap=" + fmt_short(gap)});
  }
  // quadratic form matches the assembled matrix
  if (!extras.empty() && extras.back().form_consistency_gap) {
    const double gap = *extras.back().form_consistency_gap;
    verdicts.push_back({"form_consistency", gap <= 1e-12, "rel_gap=" + fmt_short(gap)});
  }
  // heat / unitary decrease along the family; ties allowed only once the
  // sequence has hit rounding level
  auto strictly_down = [](const std::vector<double>& v) {
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
      if (!(v[i + 1] < v[i] || (v[i] <= 1e-12 && v[i + 1] <= 1e-12))) return false;
    return true;
  };
  for (std::size_t k = 0; k < s.times_heat.size(); ++k) {
    std::vector<double> v;
    for (const RowExtras& e : extras) v.push_back(e.heat_norm[k]);
    verdicts.push_back({"heat_decreasing_t" + fmt_short(s.times_heat[k]), strictly_down(v),
                        sequence_summary(v)});
  }
  for (std::size_t k = 0; k < s.times_unitary.size(); ++k) {
    std::vector<double> v;
    for (const RowExtras& e : extras) v.push_back(e.unitary_strong_max[k]);
    verdicts.push_back({"unitary_strong_decreasing_t" + fmt_short(s.times_unitary[k]),
                        strictly_down(v), sequence_summary(v)});
  }
  // inclusion gap never exceeds the windowed Hausdorff distance
  {
    bool ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i)
      ok = ok && extras[i].inclusion_gap <= rows[i].hausdorff + 1e-12;
    verdicts.push_back({"gap_le_hausdorff", ok, ""});
  }
  // projection ranks in the isolating window
  if (s.proj_window) {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const RowExtras& e = extras[i];
      ok = ok && e.proj_rank_inequality_ok;
      if (rows[i].family_index >= s.proj_rank_from)
        ok = ok && e.proj_rank_limit == e.proj_rank_approx;
      detail += (i ? " " : "") + std::to_string(e.proj_rank_approx);
    }
    verdicts.push_back({"proj_ranks", ok,
                        "rank_A=" + std::to_string(extras.front().proj_rank_limit) +
                            " rank_An=[" + detail + "] from_n=" +
                            std::to_string(s.proj_rank_from)});
  }
}

}  // namespace

bool SweepResult::all_pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

SweepResult run_sweep(const Scenario& scenario, const SweepOptions& options) {
  SweepResult result;
  result.scenario = scenario;

  const LimitSide side = build_limit_side(scenario);
  const std::size_t count = scenario.ns.size();
  result.rows.resize(count);
  result.extras.resize(count);

  unsigned threads = options.threads > 0
                         ? static_cast<unsigned>(options.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, count);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(count);
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= count) return;
      RowJob job{&scenario, &side, scenario.ns[idx], idx + 1 == count, options.timing};
      try {
        auto [row, extras] = compute_row(job);
        result.rows[idx] = std::move(row);
        result.extras[idx] = std::move(extras);
      } catch (const Error& e) {
        failures[idx] = std::make_exception_ptr(
            Error(e.kind(), "family member n = " + std::to_string(job.n) + ": " + e.what()));
      } catch (...) {
        failures[idx] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  append_builtin_verdicts(scenario, result.rows, result.extras, result.verdicts);

  // discrete form bound for the limit potential, at unit eps
  {
    const sturm::QfreeReport rep = sturm::qfree_check(
        {scenario.grid(), scenario.family->limit()}, 1.0, 60, scenario.qfree_slack, scenario.seed);
    result.verdicts.push_back(
        {"qfree", rep.holds, "worst_ratio=" + fmt_short(rep.worst_ratio) + " slack=" +
                                 fmt_short(scenario.qfree_slack)});
  }

  append_configured_verdicts(scenario, result.rows, result.verdicts);
  return result;
}

std::string format_csv(const SweepResult& result) {
  const Scenario& s = result.scenario;
  std::string out;
  out += "# scenario " + s.name + " seed " + std::to_string(s.seed) + " m " +
         std::to_string(s.m) + "\n";
  const std::vector<std::string> cols = s.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out += cols[i];
    out += (i + 1 < cols.size()) ? "," : "\n";
  }
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i] == "n") out += std::to_string(row.family_index);
      else if (cols[i] == "dim") out += std::to_string(row.dim);
      else out += fmt_num(column_value(row, cols[i]));
      out += (i + 1 < cols.size()) ? "," : "\n";
    }
  }
  return out;
}

void emit(const SweepResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create output directory '" + out_dir + "'");

  auto write_file = [&](const std::string& name, const std::string& body) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    out << body;
    if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
  };

  write_file("sweep.csv", format_csv(result));

  std::string verdicts = "# verdict status measured\n";
  for (const Verdict& v : result.verdicts)
    verdicts += v.name + " " + (v.pass ? "PASS" : "FAIL") + " " + v.measured + "\n";
  write_file("verdicts.txt", verdicts);

  for (const std::string& col : result.scenario.columns()) {
    if (col == "n") continue;
    std::string body;
    for (const auto& row : result.rows)
      body += std::to_string(row.family_index) + " " + fmt_num(column_value(row, col)) + "\n";
    write_file(col + ".dat", body);
  }
}

int verify(const Scenario& scenario, const SweepOptions& options) {
  const SweepResult result = run_sweep(scenario, options);
  const Verdict* first_fail = nullptr;
  for (const Verdict& v : result.verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name
              << (v.measured.empty() ? "" : " " + v.measured) << "\n";
    if (!v.pass && !first_fail) first_fail = &v;
  }
  if (first_fail) {
    std::cout << "FAIL " << result.scenario.name << " first_failure=" << first_fail->name << "\n";
    return 1;
  }
  std::cout << "OK " << result.scenario.name << "\n";
  return 0;
}

std::vector<double> member_spectrum(const Scenario& scenario, int n) {
  const SelfAdjointOp op = sturm::discretize({scenario.grid(), scenario.family->member(n)});
  return op.eigenvalues();
}

}  // namespace resolvlab::expcli
