#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "resolvlab/selfadj.hpp"
#include "resolvlab/wspace.hpp"

namespace resolvlab::conv {

using numlin::cxd;
using numlin::DenseMatrix;
using selfadj::SelfAdjointOp;
using selfadj::SpectrumWindow;
using wspace::Embedding;
using wspace::EmbeddingMetrics;

/// The triple (A on H, A_n on H_n, J: H -> H_n). Operators are shared so a
/// sweep can reuse one limit operator across all family members.
struct ConvergencePair {
  ConvergencePair(std::shared_ptr<const SelfAdjointOp> limit_op,
                  std::shared_ptr<const SelfAdjointOp> approx_op, Embedding j);

  std::shared_ptr<const SelfAdjointOp> limit;
  std::shared_ptr<const SelfAdjointOp> approx;
  Embedding j;
  DenseMatrix jstar;   // cached weighted adjoint of J
};

enum class Mode { Norm, Strong };
enum class SemigroupKind { Unitary, Heat };

/// ||J* R_{A_n}(z) J - R_A(z)|| on H.
double nrc_distance(const ConvergencePair& pair, cxd z);

/// ||R_{A_n}(z) J - J R_A(z)|| as a map H -> H_n.
double nrc_distance_alt(const ConvergencePair& pair, cxd z);

struct StrongResiduals {
  std::vector<double> pullback;     // ||J* R_n(z) J psi - R(z) psi||
  std::vector<double> intertwine;   // ||R_n(z) J psi - J R(z) psi||
  std::vector<bool> dominated;      // pullback <= ||J*|| intertwine + defect ||R psi|| + tol
};

StrongResiduals src_residuals(const ConvergencePair& pair, cxd z,
                              std::span<const std::vector<cxd>> test_set);

struct FcalcDistance {
  double norm_distance = 0.0;        // max(||J* f(A_n) J - f(A)||, ||J^{-1} f(A_n) J - f(A)||)
  std::vector<double> residuals;     // strong mode: ||J* f(A_n) J psi - f(A) psi||
};

FcalcDistance fcalc_distance(const ConvergencePair& pair, const std::function<cxd(double)>& f,
                             Mode mode, std::span<const std::vector<cxd>> test_set = {});

struct SemigroupDistance {
  double norm_distance = 0.0;
  std::vector<double> residuals;
  double lower_bound_limit = 0.0;
  double lower_bound_approx = 0.0;
};

SemigroupDistance semigroup_distance(const ConvergencePair& pair, double t, SemigroupKind kind,
                                     Mode mode, std::span<const std::vector<cxd>> test_set = {});

struct RelboundCertificate {
  double certificate = 0.0;   // c_n = ||(A_n J - J A)(A^2 + I)^{-1/2}||
  double nrc_i = 0.0;
  bool bound_ok = false;      // nrc_i <= 2 c_n + 1e-10
};

RelboundCertificate relbound_certificate(const ConvergencePair& pair);

/// Largest-magnitude eigenvalue of the pencil (J^H K_n J - K, K - gamma W + W):
/// the sharpest rho with |q_{A_n}(J psi) - q_A(psi)| <= rho (q_{A-gamma}(psi) + ||psi||^2).
double form_delta(const ConvergencePair& pair, double gamma);

/// B_n = J* A_n J on H, built from the pulled-back form J^H K_n J.
SelfAdjointOp sandwich_operator(const ConvergencePair& pair);

/// max over lambda in sigma(A) cap win of dist(lambda, sigma(A_n)).
double spectra_inclusion_gap(const ConvergencePair& pair, const SpectrumWindow& win);

/// Hausdorff distance between the windowed spectra; +inf when exactly one
/// of the windowed sets is empty, 0 when both are.
double spectra_hausdorff(const ConvergencePair& pair, const SpectrumWindow& win);

struct ProjectionDiagnostics {
  std::vector<double> residuals;   // ||J* P_{A_n}(win) J psi - P_A(win) psi||
  std::size_t rank_limit = 0;
  std::size_t rank_approx = 0;
  bool rank_inequality_ok = false;  // rank_limit <= ||J||^2 rank_approx + tol
};

ProjectionDiagnostics projection_diagnostics(const ConvergencePair& pair, const SpectrumWindow& win,
                                             std::span<const std::vector<cxd>> test_set);

/// Number of eigenvalues in (lambda - eps, lambda + eps); endpoints must be
/// clear of the spectrum.
std::size_t ess_window_count(const SelfAdjointOp& op, double lambda, double eps);

struct WeakResiduals {
  std::vector<double> weak;     // |<phi, (J* R_n(z) J - R(z)) psi>|
  std::vector<double> strong;   // ||(J* R_n(z) J - R(z)) psi||
};

WeakResiduals weak_residuals(const ConvergencePair& pair, cxd z,
                             std::span<const std::pair<std::vector<cxd>, std::vector<cxd>>> probes);

/// Triangle bounds tying the two distance flavors together; `within` checks
/// both directions at the given slack.
struct EquivalenceAudit {
  double nrc = 0.0;
  double nrc_alt = 0.0;
  double bound_nrc = 0.0;       // ||J*|| nrc_alt + jstarj_defect ||R_A(z)||
  double bound_nrc_alt = 0.0;   // ||J|| nrc + jjstar_defect ||R_n(z)|| ||J||
  bool within = false;
};

EquivalenceAudit equivalence_audit(const ConvergencePair& pair, cxd z, double slack = 1e-9);

/// Transport of the alt distance from z_ref to z through the resolvent
/// identity: nrc_alt(z) <= (1 + |z - z_ref| ||R_n(z)||) nrc_alt(z_ref)
/// (1 + |z - z_ref| ||R_A(z)||).
struct ZIndependenceAudit {
  cxd z;
  double nrc = 0.0;
  double nrc_alt = 0.0;
  double bound = 0.0;
  bool within = false;
};

ZIndependenceAudit z_independence_audit(const ConvergencePair& pair, cxd z_ref,
                                        double nrc_alt_ref, cxd z, double slack = 1e-9);

/// Resolvent inequality for the sandwich operator at spectral parameter
/// -lambda, lambda > -gamma:
///   ||R_B(-lambda) - R_A(-lambda)|| <= ||R_A(-lambda)|| rho_l / (1 - rho_l),
/// rho_l = rho max(1, 1/(lambda + gamma)). Not applicable when rho_l >= 1.
struct SandwichAudit {
  double rho = 0.0;
  double rho_lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = false;
  bool within = false;
};

SandwichAudit sandwich_audit(const ConvergencePair& pair, double gamma, double lambda,
                             double slack = 1e-8);

/// One sweep row of distance diagnostics.
struct ConvergenceReport {
  int family_index = 0;
  std::size_t dim = 0;
  EmbeddingMetrics metrics;
  double nrc = 0.0;
  double nrc_alt = 0.0;
  double src_max = 0.0;
  std::vector<std::pair<std::string, double>> fcalc;
  double hausdorff = 0.0;
  double relbound_cert = 0.0;
  double form_delta = 0.0;
  double min_eig_limit = 0.0;
  double min_eig_approx = 0.0;
  double runtime_ms = 0.0;
  std::string notes;
};

}  // namespace resolvlab::conv
