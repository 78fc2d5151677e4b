#include "resolvlab/wspace.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace resolvlab::wspace {

Grid::Grid(double a, double b, std::size_t m) : a_(a), b_(b), m_(m) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::GridMismatch, "grid requires finite a < b");
  if (m == 0) throw Error(ErrorKind::GridMismatch, "grid requires at least one interior node");
}

std::vector<double> Grid::nodes() const {
  std::vector<double> out(m_);
  for (std::size_t i = 0; i < m_; ++i) out[i] = node(i);
  return out;
}

WeightedSpace::WeightedSpace(Grid grid, std::vector<double> weights)
    : grid_(grid), weights_(std::move(weights)) {
  if (weights_.size() != grid_.size())
    throw Error(ErrorKind::DimensionMismatch, "weight count does not match grid size");
  const double h = grid_.spacing();
  mass_.resize(weights_.size());
  mass_sqrt_.resize(weights_.size());
  mass_inv_sqrt_.resize(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::CoefficientSignViolation, "weights must be strictly positive and finite");
    mass_[i] = h * w;
    mass_sqrt_[i] = std::sqrt(mass_[i]);
    mass_inv_sqrt_[i] = 1.0 / mass_sqrt_[i];
  }
}

cxd WeightedSpace::inner(std::span<const cxd> f, std::span<const cxd> g) const {
  if (f.size() != dim() || g.size() != dim())
    throw Error(ErrorKind::DimensionMismatch, "inner product vector sizes");
  cxd acc(0.0, 0.0);
  for (std::size_t i = 0; i < dim(); ++i) acc += mass_[i] * std::conj(f[i]) * g[i];
  return acc;
}

double WeightedSpace::norm(std::span<const cxd> f) const {
  if (f.size() != dim())
    throw Error(ErrorKind::DimensionMismatch, "norm vector size");
  double acc = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) acc += mass_[i] * std::norm(f[i]);
  return std::sqrt(acc);
}

cxd inner(const WeightedSpace& space, std::span<const cxd> f, std::span<const cxd> g) {
  return space.inner(f, g);
}

Embedding::Embedding(WeightedSpace src_space, WeightedSpace dst_space, DenseMatrix j)
    : src(std::move(src_space)), dst(std::move(dst_space)), map(std::move(j)) {
  if (map.rows() != dst.dim() || map.cols() != src.dim())
    throw Error(ErrorKind::DimensionMismatch, "embedding matrix must be dst-dim x src-dim");
}

double weighted_op_norm(const DenseMatrix& b, const WeightedSpace& src, const WeightedSpace& dst) {
  if (b.rows() != dst.dim() || b.cols() != src.dim())
    throw Error(ErrorKind::DimensionMismatch, "weighted_op_norm shapes");
  DenseMatrix scaled = b;
  scaled.scale_rows(dst.mass_sqrt());
  scaled.scale_cols(src.mass_inv_sqrt());
  return numlin::op_norm_euclid(scaled);
}

DenseMatrix adjoint_map(const Embedding& j) {
  DenseMatrix adj = j.map.adjoint();     // src-dim x dst-dim
  std::vector<double> inv_mass(j.src.dim());
  for (std::size_t i = 0; i < inv_mass.size(); ++i) inv_mass[i] = 1.0 / j.src.mass()[i];
  adj.scale_rows(inv_mass);
  adj.scale_cols(j.dst.mass());
  return adj;
}

DenseMatrix weighted_adjoint(const DenseMatrix& m, const WeightedSpace& space) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw Error(ErrorKind::DimensionMismatch, "weighted_adjoint shapes");
  DenseMatrix adj = m.adjoint();
  std::vector<double> inv_mass(space.dim());
  for (std::size_t i = 0; i < inv_mass.size(); ++i) inv_mass[i] = 1.0 / space.mass()[i];
  adj.scale_rows(inv_mass);
  adj.scale_cols(space.mass());
  return adj;
}

EmbeddingMetrics embedding_metrics(const Embedding& j) {
  EmbeddingMetrics out;
  out.j_norm = weighted_op_norm(j.map, j.src, j.dst);
  const DenseMatrix adj = adjoint_map(j);
  DenseMatrix jstarj = adj * j.map;
  jstarj -= DenseMatrix::identity(j.src.dim());
  out.jstarj_defect = weighted_op_norm(jstarj, j.src, j.src);
  DenseMatrix jjstar = j.map * adj;
  jjstar -= DenseMatrix::identity(j.dst.dim());
  out.jjstar_defect = weighted_op_norm(jjstar, j.dst, j.dst);
  return out;
}

JcosReport check_jcos(const Embedding& j, std::span<const std::vector<cxd>> test_set, double tol) {
  const DenseMatrix adj = adjoint_map(j);
  JcosReport report;
  report.residuals.reserve(test_set.size());
  bool ok = true;
  for (const auto& psi : test_set) {
    if (psi.size() != j.src.dim())
      throw Error(ErrorKind::DimensionMismatch, "test vector dimension");
    const double nrm = j.src.norm(psi);
    if (nrm == 0.0)
      throw Error(ErrorKind::DimensionMismatch, "test vector must be nonzero");
    std::vector<cxd> jj = numlin::apply(adj, numlin::apply(j.map, psi));
    for (std::size_t i = 0; i < jj.size(); ++i) jj[i] -= psi[i];
    const double res = j.src.norm(jj) / nrm;
    ok = ok && res <= tol;
    report.residuals.push_back(res);
  }
  report.all_within = ok;
  return report;
}

JInverse j_inverse(const Embedding& j) {
  const EmbeddingMetrics metrics = embedding_metrics(j);
  if (metrics.jjstar_defect >= 1.0)
    throw Error(ErrorKind::NotInvertible, "JJ* defect >= 1, JJ* may be singular");

  const DenseMatrix adj = adjoint_map(j);
  const DenseMatrix jjstar = j.map * adj;
  // X = J* (JJ*)^{-1} solved as (JJ*)^T X^T = (J*)^T
  DenseMatrix xt = numlin::solve(jjstar.transpose(), adj.transpose());
  JInverse out;
  out.inverse = xt.transpose();

  DenseMatrix gap = adj;
  gap -= out.inverse;
  out.adjoint_gap = weighted_op_norm(gap, j.dst, j.src);

  // two-sided iff J*J is invertible, i.e. J injective
  DenseMatrix scaled = j.map;
  scaled.scale_rows(j.dst.mass_sqrt());
  scaled.scale_cols(j.src.mass_inv_sqrt());
  DenseMatrix gram = scaled.adjoint() * scaled;
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t k = i; k < gram.cols(); ++k) {
      const cxd sym = 0.5 * (gram(i, k) + std::conj(gram(k, i)));
      gram(i, k) = sym;
      gram(k, i) = std::conj(sym);
    }
  const auto evs = numlin::eigh(gram, false).values;
  const double top = evs.empty() ? 0.0 : evs.back();
  out.two_sided = !evs.empty() && evs.front() > 1e-12 * std::max(1.0, top);
  return out;
}

std::vector<std::vector<cxd>> make_test_dictionary(const WeightedSpace& space,
                                                   std::size_t n_sine, std::size_t n_random,
                                                   std::uint64_t seed) {
  const std::size_t dim = space.dim();
  const std::size_t modes = std::min(n_sine, dim);
  const Grid& grid = space.grid();
  const double length = grid.b() - grid.a();

  std::vector<std::vector<cxd>> dict;
  dict.reserve(modes + n_random);
  std::vector<std::vector<cxd>> base;
  for (std::size_t k = 1; k <= modes; ++k) {
    std::vector<cxd> v(dim);
    for (std::size_t i = 0; i < dim; ++i)
      v[i] = std::sin(static_cast<double>(k) * std::numbers::pi * (grid.node(i) - grid.a()) / length);
    const double nrm = space.norm(v);
    for (cxd& z : v) z /= nrm;
    base.push_back(v);
    dict.push_back(std::move(v));
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t r = 0; r < n_random && !base.empty(); ++r) {
    std::vector<cxd> v(dim, cxd(0.0, 0.0));
    for (const auto& mode : base) {
      const cxd c(gauss(rng), gauss(rng));
      for (std::size_t i = 0; i < dim; ++i) v[i] += c * mode[i];
    }
    const double nrm = space.norm(v);
    for (cxd& z : v) z /= nrm;
    dict.push_back(std::move(v));
  }
  return dict;
}

}  // namespace resolvlab::wspace
