#include "resolvlab/selfadj.hpp"

#include <cmath>
#include <limits>

namespace resolvlab::selfadj {

SelfAdjointOp::SelfAdjointOp(WeightedSpace space, DenseMatrix form)
    : space_(std::move(space)), form_(std::move(form)) {
  if (form_.rows() != space_.dim() || form_.cols() != space_.dim())
    throw Error(ErrorKind::DimensionMismatch, "form matrix must be dim x dim");
  if (!form_.is_hermitian(1e-12))
    throw Error(ErrorKind::NonHermitian, "form matrix is not Hermitian within 1e-12");

  // reduce the pencil (K, W) by the diagonal similarity B = W^{-1/2} K W^{-1/2}
  DenseMatrix b = form_;
  b.scale_rows(space_.mass_inv_sqrt());
  b.scale_cols(space_.mass_inv_sqrt());
  numlin::EigenDecomp dec = numlin::eigh(b, true);
  values_ = std::move(dec.values);
  vectors_ = std::move(dec.vectors);
  vectors_.scale_rows(space_.mass_inv_sqrt());   // V = W^{-1/2} U, so V^H W V = I

  vectors_adj_ = vectors_.adjoint();
  vectors_adj_.scale_cols(space_.mass());        // V^H W

  for (double v : values_) op_norm_ = std::max(op_norm_, std::abs(v));
}

DenseMatrix SelfAdjointOp::action() const {
  DenseMatrix a = form_;
  std::vector<double> inv_mass(space_.dim());
  for (std::size_t i = 0; i < inv_mass.size(); ++i) inv_mass[i] = 1.0 / space_.mass()[i];
  a.scale_rows(inv_mass);
  return a;
}

double SelfAdjointOp::spectral_gap(cxd z) const {
  double gap = std::numeric_limits<double>::infinity();
  for (double v : values_) gap = std::min(gap, std::abs(cxd(v, 0.0) - z));
  return gap;
}

std::vector<cxd> SelfAdjointOp::eigen_coefficients(std::span<const cxd> psi) const {
  return numlin::apply(vectors_adj_, psi);
}

SelfAdjointOp from_form(WeightedSpace space, DenseMatrix form) {
  return SelfAdjointOp(std::move(space), std::move(form));
}

const std::vector<double>& spectrum(const SelfAdjointOp& a) { return a.eigenvalues(); }

namespace {

DenseMatrix assemble(const SelfAdjointOp& a, const std::vector<cxd>& samples) {
  DenseMatrix scaled = a.eigenvectors();
  scaled.scale_cols_complex(samples);
  return scaled * a.eigenvectors_adjoint();
}

}  // namespace

DenseMatrix func_calc(const SelfAdjointOp& a, const std::function<cxd(double)>& f) {
  std::vector<cxd> samples(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const cxd v = f(a.eigenvalues()[k]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::NonFiniteFunctionValue, "function not finite on an eigenvalue");
    samples[k] = v;
  }
  return assemble(a, samples);
}

DenseMatrix resolvent(const SelfAdjointOp& a, cxd z) {
  const double guard = 1e-10 * (1.0 + a.op_norm());
  if (a.spectral_gap(z) <= guard)
    throw Error(ErrorKind::SpectrumProximity, "spectral parameter too close to the spectrum");
  std::vector<cxd> samples(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) samples[k] = 1.0 / (cxd(a.eigenvalues()[k], 0.0) - z);
  return assemble(a, samples);
}

double endpoint_guard(const SelfAdjointOp& a, const SpectrumWindow& win) {
  return win.endpoint_guard > 0.0 ? win.endpoint_guard : 1e-9 * (1.0 + a.op_norm());
}

namespace {

void check_window(const SelfAdjointOp& a, const SpectrumWindow& win) {
  if (!(win.lo < win.hi))
    throw Error(ErrorKind::EndpointCollision, "window endpoints must satisfy lo < hi");
  const double guard = endpoint_guard(a, win);
  for (double v : a.eigenvalues())
    if (std::abs(v - win.lo) < guard || std::abs(v - win.hi) < guard)
      throw Error(ErrorKind::EndpointCollision, "eigenvalue within guard of a window endpoint");
}

}  // namespace

Projection spectral_projection(const SelfAdjointOp& a, const SpectrumWindow& win) {
  check_window(a, win);
  std::vector<cxd> samples(a.dim());
  std::size_t rank = 0;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const bool inside = a.eigenvalues()[k] > win.lo && a.eigenvalues()[k] < win.hi;
    samples[k] = inside ? 1.0 : 0.0;
    rank += inside ? 1 : 0;
  }
  return Projection{assemble(a, samples), rank};
}

double spectral_measure(const SelfAdjointOp& a, std::span<const cxd> psi, const SpectrumWindow& win) {
  check_window(a, win);
  if (psi.size() != a.dim())
    throw Error(ErrorKind::DimensionMismatch, "spectral_measure vector size");
  const std::vector<cxd> c = a.eigen_coefficients(psi);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    if (a.eigenvalues()[k] > win.lo && a.eigenvalues()[k] < win.hi) acc += std::norm(c[k]);
  return acc;
}

DenseMatrix unitary_group(const SelfAdjointOp& a, double t) {
  std::vector<cxd> samples(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k)
    samples[k] = std::exp(cxd(0.0, t * a.eigenvalues()[k]));
  return assemble(a, samples);
}

DenseMatrix heat_semigroup(const SelfAdjointOp& a, double t) {
  if (t < 0.0)
    throw Error(ErrorKind::NegativeTime, "heat semigroup requires t >= 0");
  std::vector<cxd> samples(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) samples[k] = std::exp(-t * a.eigenvalues()[k]);
  return assemble(a, samples);
}

double lower_bound(const SelfAdjointOp& a) {
  return a.eigenvalues().empty() ? 0.0 : a.eigenvalues().front();
}

}  // namespace resolvlab::selfadj
