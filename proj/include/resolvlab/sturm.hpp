#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "resolvlab/selfadj.hpp"
#include "resolvlab/wspace.hpp"

namespace resolvlab::sturm {

using numlin::cxd;
using numlin::DenseMatrix;
using selfadj::SelfAdjointOp;
using wspace::Embedding;
using wspace::Grid;
using wspace::WeightedSpace;

using ScalarField = std::function<double(double)>;

/// Coefficient triple for (1/w)(-(p f')' + q f) together with the hypothesis
/// constants: w, p >= delta > 0 and q >= gamma at every sample point.
struct Coefficients {
  ScalarField w;
  ScalarField p;
  ScalarField q;
  double delta = 0.0;
  double gamma = 0.0;
};

/// Dirichlet problem on a uniform grid; boundary conditions are fixed to
/// Dirichlet at both ends.
struct SLProblem {
  Grid grid;
  Coefficients coeffs;
};

/// Three-point scheme with midpoint-sampled p and node-sampled w, q:
///   K_ii = (p_{i-1/2} + p_{i+1/2})/h + q_i h,   K_{i,i+1} = -p_{i+1/2}/h,
/// as an operator on WeightedSpace(grid, w samples).
SelfAdjointOp discretize(const SLProblem& prob);

/// Dirichlet quadratic form
///   sum_{i=0..m} p_{i+1/2} |f_{i+1} - f_i|^2 / h + sum_i q_i |f_i|^2 h
/// with implicit zeros at the boundary; equals Re(f^H K f).
double form_value(const SLProblem& prob, std::span<const cxd> f);

/// Forward-difference factorization for q == 0: D maps the node space into
/// the staggered midpoint space with weights p_{i+1/2}, and D*D reproduces
/// the operator exactly.
struct Factorization {
  DenseMatrix d_map;        // (m+1) x m, (Df)_{i+1/2} = (f_{i+1} - f_i)/h
  WeightedSpace staggered;
};

Factorization factorize(const SLProblem& prob);

/// sup over unit cells [k, k+1) intersecting (a, b) of the midpoint-rule
/// integral of |q| at the given resolution.
double local_l1_bound(const ScalarField& q, double a, double b, double resolution);

struct QfreeReport {
  bool holds = false;
  double worst_ratio = 0.0;
};

/// Discrete check of the form bound
///   int |q||f|^2 <= M (eps int p|f'|^2 + (1 + 1/eps) int |f|^2 w)
/// on the fixed dictionary, seeded localized bumps filling `sample_count`.
/// `slack` widens the constant to absorb coarse-grid deviation.
QfreeReport qfree_check(const SLProblem& prob, double eps, std::size_t sample_count,
                        double slack = 0.05, std::uint64_t seed = 0);

WeightedSpace space_for(const Grid& grid, const Coefficients& coeffs);

/// Identity-map embedding between two spaces over the same grid.
Embedding make_embedding(const WeightedSpace& src, const WeightedSpace& dst);
Embedding make_embedding(const Grid& grid, const Coefficients& src, const Coefficients& dst);

enum class FamilyKind { Slnrc, CompactCutoff, CustomPair };

struct Deviations {
  double w_ratio_sup = 0.0;   // sup |w_n/w - 1| over nodes and midpoints
  double p_ratio_sup = 0.0;
  double q_cell_l1 = 0.0;     // sup_k int_{[k,k+1) cap I} |q_n - q|
};

/// Indexed coefficient triples converging to a limit triple, with per-n
/// deviation functionals.
class CoefficientFamily {
 public:
  CoefficientFamily(FamilyKind kind, Grid grid, Coefficients limit,
                    std::function<Coefficients(int)> schedule, std::vector<int> ns);

  FamilyKind kind() const noexcept { return kind_; }
  const Grid& grid() const noexcept { return grid_; }
  const Coefficients& limit() const noexcept { return limit_; }
  const std::vector<int>& indices() const noexcept { return ns_; }
  const std::vector<Deviations>& deviations() const noexcept { return deviations_; }

  Coefficients member(int n) const { return schedule_(n); }

 private:
  friend CoefficientFamily slnrc_family(const Grid&, Coefficients,
                                        std::function<Coefficients(int)>, std::vector<int>,
                                        FamilyKind);

  FamilyKind kind_;
  Grid grid_;
  Coefficients limit_;
  std::function<Coefficients(int)> schedule_;
  std::vector<int> ns_;
  std::vector<Deviations> deviations_;
};

/// Family with deviations shrinking to zero; every member must satisfy the
/// hypotheses with the limit's delta and gamma. The Slnrc kind additionally
/// requires the three deviation functionals to be non-increasing in n.
CoefficientFamily slnrc_family(const Grid& grid, Coefficients limit,
                               std::function<Coefficients(int)> schedule, std::vector<int> ns,
                               FamilyKind kind = FamilyKind::Slnrc);

/// Members equal the limit triple `cinf` on |x| <= n and the base triple
/// `c0` outside; deviation functionals see only the tail region.
CoefficientFamily compact_cutoff_family(const Grid& grid, Coefficients c0, Coefficients cinf,
                                        std::vector<int> ns);

}  // namespace resolvlab::sturm
