#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resolvlab/conv.hpp"
#include "resolvlab/scenario.hpp"

namespace resolvlab::expcli {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string measured;
};

/// Row-level diagnostics that do not appear as CSV columns.
struct RowExtras {
  std::vector<double> heat_norm;             // per times_heat entry
  std::vector<double> unitary_strong_max;    // per times_unitary entry
  std::vector<conv::ZIndependenceAudit> z_audits;
  conv::EquivalenceAudit equivalence;
  conv::SandwichAudit sandwich;
  double inclusion_gap = 0.0;
  bool relbound_ok = false;
  bool has_projection = false;
  std::size_t proj_rank_limit = 0;
  std::size_t proj_rank_approx = 0;
  bool proj_rank_inequality_ok = true;
  double proj_residual_max = 0.0;
  std::optional<double> fcalc_conj_gap;      // |d(f) - d(conj f)| on the last row
  std::optional<double> form_consistency_gap;  // form_value vs psi^H K psi, last row
};

struct SweepResult {
  Scenario scenario;
  std::vector<conv::ConvergenceReport> rows;
  std::vector<RowExtras> extras;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

struct SweepOptions {
  int threads = 0;      // 0 selects the hardware thread count
  bool timing = false;  // measure wall-clock runtime_ms (off for reproducible bytes)
};

SweepResult run_sweep(const Scenario& scenario, const SweepOptions& options = {});

/// Deterministic CSV bytes for the sweep (header comment carries the seed).
std::string format_csv(const SweepResult& result);

/// Writes sweep.csv, verdicts.txt and per-column plot data files.
void emit(const SweepResult& result, const std::string& out_dir);

/// Runs the sweep and prints one machine-readable line per verdict; returns
/// 0 iff all verdicts pass.
int verify(const Scenario& scenario, const SweepOptions& options = {});

/// Spectrum of the family member at index n.
std::vector<double> member_spectrum(const Scenario& scenario, int n);

}  // namespace resolvlab::expcli
