#pragma once

#include <functional>
#include <span>
#include <vector>

#include "resolvlab/wspace.hpp"

namespace resolvlab::selfadj {

using numlin::cxd;
using numlin::DenseMatrix;
using wspace::WeightedSpace;

/// Operator self-adjoint w.r.t. a weighted inner product, stored as the
/// Hermitian form matrix K with mass matrix W = h diag(w); the action is
/// A = W^{-1} K. The spectral decomposition (W-orthonormal eigenvectors,
/// eigenvalues ascending) is computed eagerly so that every query is
/// read-only afterwards.
class SelfAdjointOp {
 public:
  SelfAdjointOp(WeightedSpace space, DenseMatrix form);

  const WeightedSpace& space() const noexcept { return space_; }
  const DenseMatrix& form_matrix() const noexcept { return form_; }
  std::size_t dim() const noexcept { return space_.dim(); }

  const std::vector<double>& eigenvalues() const noexcept { return values_; }
  /// Columns satisfy V^H W V = I.
  const DenseMatrix& eigenvectors() const noexcept { return vectors_; }
  /// Precomputed V^H W; `func_calc` style operators are V f(Lambda) (V^H W).
  const DenseMatrix& eigenvectors_adjoint() const noexcept { return vectors_adj_; }

  DenseMatrix action() const;                       // W^{-1} K
  double op_norm() const noexcept { return op_norm_; }  // max |eigenvalue|
  double spectral_gap(cxd z) const;                 // dist(z, spectrum)

  /// Coefficients of psi in the eigenbasis: c = V^H W psi.
  std::vector<cxd> eigen_coefficients(std::span<const cxd> psi) const;

 private:
  WeightedSpace space_;
  DenseMatrix form_;
  std::vector<double> values_;
  DenseMatrix vectors_;
  DenseMatrix vectors_adj_;
  double op_norm_ = 0.0;
};

/// Half-open spectral window (lo, hi); eigenvalues within `endpoint_guard`
/// of an endpoint make projection queries fail. A zero guard selects the
/// default 1e-9 (1 + ||A||).
struct SpectrumWindow {
  double lo = 0.0;
  double hi = 0.0;
  double endpoint_guard = 0.0;
};

SelfAdjointOp from_form(WeightedSpace space, DenseMatrix form);

const std::vector<double>& spectrum(const SelfAdjointOp& a);

/// R_A(z) = (A - z)^{-1}; z must keep distance > 1e-10 (1 + ||A||) from the
/// spectrum.
DenseMatrix resolvent(const SelfAdjointOp& a, cxd z);

/// f(A) = V f(Lambda) V^H W for f sampled on the eigenvalues.
DenseMatrix func_calc(const SelfAdjointOp& a, const std::function<cxd(double)>& f);

struct Projection {
  DenseMatrix matrix;
  std::size_t rank = 0;
};

Projection spectral_projection(const SelfAdjointOp& a, const SpectrumWindow& win);

/// mu_psi(win) = ||P_A(win) psi||^2 in the weighted norm.
double spectral_measure(const SelfAdjointOp& a, std::span<const cxd> psi, const SpectrumWindow& win);

DenseMatrix unitary_group(const SelfAdjointOp& a, double t);    // e^{itA}
DenseMatrix heat_semigroup(const SelfAdjointOp& a, double t);   // e^{-tA}, t >= 0

double lower_bound(const SelfAdjointOp& a);

/// Guard actually used by projection queries for this operator/window.
double endpoint_guard(const SelfAdjointOp& a, const SpectrumWindow& win);

}  // namespace resolvlab::selfadj
