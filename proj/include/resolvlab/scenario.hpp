#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "resolvlab/selfadj.hpp"
#include "resolvlab/sturm.hpp"

namespace resolvlab::expcli {

using numlin::cxd;

/// Named bounded test function for functional-calculus distances. Functions
/// with equal limits at +-infinity support the norm-mode distance; the rest
/// are evaluated in strong mode on the test dictionary.
struct FcalcFunction {
  std::string name;
  std::function<cxd(double)> fn;
  bool norm_mode = true;
};

const FcalcFunction& fcalc_function(const std::string& name);
std::vector<std::string> fcalc_function_names();

/// Per-scenario pass/fail checks over computed columns.
struct VerdictConfig {
  std::vector<std::string> decreasing;             // strictly decreasing over n
  std::vector<std::string> trend_decreasing;       // never above the first value, final < first
  std::map<std::string, std::pair<double, double>> slope;   // log-log slope vs 1/n in [lo, hi]
  std::map<std::string, double> final_ratio;       // final < ratio * initial
  std::map<std::string, double> final_below;       // final < threshold
};

struct Scenario {
  std::string name;
  sturm::FamilyKind kind = sturm::FamilyKind::Slnrc;
  double a = 0.0;
  double b = 1.0;
  std::size_t m = 0;
  std::vector<int> ns;
  std::uint64_t seed = 0;
  std::vector<cxd> z_list;                       // audit parameters; reports always use z = i
  selfadj::SpectrumWindow window;                // hausdorff window
  std::optional<selfadj::SpectrumWindow> proj_window;
  int proj_rank_from = 0;
  double delta = 0.0;
  double gamma = 0.0;
  std::vector<std::string> fcalc_names;
  std::vector<double> times_heat;
  std::vector<double> times_unitary;
  double qfree_slack = 0.05;
  double relbound_slack = 1e-10;
  double equiv_slack = 1e-9;
  double sandwich_slack = 1e-8;
  double sandwich_lambda = 1.0;
  VerdictConfig verdicts;

  std::shared_ptr<const sturm::CoefficientFamily> family;

  wspace::Grid grid() const { return wspace::Grid(a, b, m); }
  /// Full CSV column list in emission order.
  std::vector<std::string> columns() const;
};

Scenario load_scenario(const std::string& path);

/// Same as load_scenario but from an in-memory config body.
Scenario scenario_from_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace resolvlab::expcli
