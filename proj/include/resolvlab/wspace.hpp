#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "resolvlab/numlin.hpp"

namespace resolvlab::wspace {

using numlin::cxd;
using numlin::DenseMatrix;

/// Uniform grid of m interior nodes on (a, b): x_i = a + (i+1) h with
/// h = (b - a)/(m + 1). Dirichlet boundary values live at a and b and are
/// not stored.
class Grid {
 public:
  Grid(double a, double b, std::size_t m);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return m_; }
  double spacing() const noexcept { return (b_ - a_) / static_cast<double>(m_ + 1); }
  double node(std::size_t i) const { return a_ + static_cast<double>(i + 1) * spacing(); }
  double midpoint(std::size_t i) const {   // x_{i + 1/2}, i = 0..m
    return a_ + (static_cast<double>(i) + 0.5) * spacing();
  }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const noexcept {
    return a_ == other.a_ && b_ == other.b_ && m_ == other.m_;
  }

 private:
  double a_;
  double b_;
  std::size_t m_;
};

/// Discrete weighted L^2 space: <f, g> = h sum_i w_i conj(f_i) g_i with all
/// weights strictly positive. Conjugate-linear in the first slot.
class WeightedSpace {
 public:
  WeightedSpace(Grid grid, std::vector<double> weights);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Diagonal of the mass matrix W = h diag(w).
  const std::vector<double>& mass() const noexcept { return mass_; }
  const std::vector<double>& mass_sqrt() const noexcept { return mass_sqrt_; }
  const std::vector<double>& mass_inv_sqrt() const noexcept { return mass_inv_sqrt_; }

  cxd inner(std::span<const cxd> f, std::span<const cxd> g) const;
  double norm(std::span<const cxd> f) const;

  bool operator==(const WeightedSpace& other) const noexcept {
    return grid_ == other.grid_ && weights_ == other.weights_;
  }

 private:
  Grid grid_;
  std::vector<double> weights_;
  std::vector<double> mass_;
  std::vector<double> mass_sqrt_;
  std::vector<double> mass_inv_sqrt_;
};

cxd inner(const WeightedSpace& space, std::span<const cxd> f, std::span<const cxd> g);

/// Bounded map J between two weighted spaces, stored as a dense
/// dst-dim x src-dim matrix.
struct Embedding {
  Embedding(WeightedSpace src_space, WeightedSpace dst_space, DenseMatrix j);

  WeightedSpace src;
  WeightedSpace dst;
  DenseMatrix map;
};

struct EmbeddingMetrics {
  double j_norm = 0.0;          // ||J|| as a map src -> dst
  double jstarj_defect = 0.0;   // ||J*J - I|| on src
  double jjstar_defect = 0.0;   // ||JJ* - I|| on dst
};

struct JcosReport {
  std::vector<double> residuals;   // ||J*J psi - psi|| / ||psi|| per test vector
  bool all_within = false;
};

struct JInverse {
  DenseMatrix inverse;       // J*(JJ*)^{-1}; a right inverse, two-sided when J*J invertible
  double adjoint_gap = 0.0;  // ||J* - J^{-1}|| (weighted, dst -> src)
  bool two_sided = false;
};

/// Operator norm of B as a map (src, W1) -> (dst, W2), computed by diagonal
/// similarity: sigma_max(W2^{1/2} B W1^{-1/2}).
double weighted_op_norm(const DenseMatrix& b, const WeightedSpace& src, const WeightedSpace& dst);

/// Weighted adjoint J* = W_src^{-1} J^H W_dst.
DenseMatrix adjoint_map(const Embedding& j);

/// Adjoint of an operator acting on a single space: W^{-1} M^H W.
DenseMatrix weighted_adjoint(const DenseMatrix& m, const WeightedSpace& space);

EmbeddingMetrics embedding_metrics(const Embedding& j);

JcosReport check_jcos(const Embedding& j, std::span<const std::vector<cxd>> test_set, double tol);

JInverse j_inverse(const Embedding& j);

/// Default strong-mode test dictionary: the first `n_sine` discrete sine
/// modes plus `n_random` seeded complex-Gaussian combinations of those modes,
/// all normalized in the space norm. Random vectors are confined to the low
/// sine-mode span so that they stand in for fixed vectors of finite energy;
/// grid white noise has no continuum counterpart.
std::vector<std::vector<cxd>> make_test_dictionary(const WeightedSpace& space,
                                                   std::size_t n_sine = 10,
                                                   std::size_t n_random = 10,
                                                   std::uint64_t seed = 0);

}  // namespace resolvlab::wspace
