#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "resolvlab/conv.hpp"
#include "resolvlab/expr.hpp"
#include "resolvlab/scenario.hpp"
#include "resolvlab/sweep.hpp"

namespace py = pybind11;

using namespace resolvlab;
using numlin::cxd;
using numlin::DenseMatrix;

namespace {

DenseMatrix matrix_from_array(const py::array_t<cxd, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<cxd> entries(a.data(), a.data() + rows * cols);
  return DenseMatrix::from_entries(rows, cols, std::move(entries));
}

py::array matrix_to_array(const DenseMatrix& m) {
  py::array_t<cxd> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

sturm::Coefficients coefficients_from_expressions(const std::string& w, const std::string& p,
                                                  const std::string& q, double delta, double gamma,
                                                  double n) {
  const expr::Expression we = expr::Expression::parse(w);
  const expr::Expression pe = expr::Expression::parse(p);
  const expr::Expression qe = expr::Expression::parse(q);
  return sturm::Coefficients{[we, n](double x) { return we.eval(x, n); },
                             [pe, n](double x) { return pe.eval(x, n); },
                             [qe, n](double x) { return qe.eval(x, n); }, delta, gamma};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Convergence diagnostics for self-adjoint operators on weighted discrete spaces";

  py::register_exception<Error>(m, "ResolvlabError");

  // numlin
  py::class_<DenseMatrix>(m, "DenseMatrix")
      .def(py::init(&matrix_from_array), py::arg("array"))
      .def_property_readonly("rows", &DenseMatrix::rows)
      .def_property_readonly("cols", &DenseMatrix::cols)
      .def("to_array", &matrix_to_array);
  py::implicitly_convertible<py::array, DenseMatrix>();

  m.def("eigh", [](const DenseMatrix& mat, bool want_vectors) {
    const numlin::EigenDecomp dec = numlin::eigh(mat, want_vectors);
    const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(dec.values.size())};
    py::array_t<double> values(shape);
    std::copy(dec.values.begin(), dec.values.end(), values.mutable_data());
    if (!want_vectors) return py::make_tuple(values, py::none());
    return py::make_tuple(values, matrix_to_array(dec.vectors));
  }, py::arg("matrix"), py::arg("want_vectors") = true);
  m.def("op_norm_euclid", [](const DenseMatrix& mat) { return numlin::op_norm_euclid(mat); });
  m.def("solve", [](const DenseMatrix& a, const DenseMatrix& b) {
    return matrix_to_array(numlin::solve(a, b));
  });
  m.def("cholesky", [](const DenseMatrix& a) { return matrix_to_array(numlin::cholesky(a)); });

  // wspace
  py::class_<wspace::Grid>(m, "Grid")
      .def(py::init<double, double, std::size_t>(), py::arg("a"), py::arg("b"), py::arg("m"))
      .def_property_readonly("a", &wspace::Grid::a)
      .def_property_readonly("b", &wspace::Grid::b)
      .def_property_readonly("m", &wspace::Grid::size)
      .def_property_readonly("spacing", &wspace::Grid::spacing)
      .def("nodes", &wspace::Grid::nodes);

  py::class_<wspace::WeightedSpace>(m, "WeightedSpace")
      .def(py::init<wspace::Grid, std::vector<double>>(), py::arg("grid"), py::arg("weights"))
      .def_property_readonly("dim", &wspace::WeightedSpace::dim)
      .def_property_readonly("grid", &wspace::WeightedSpace::grid)
      .def("weights", [](const wspace::WeightedSpace& s) {
        return std::vector<double>(s.weights().begin(), s.weights().end());
      })
      .def("inner", [](const wspace::WeightedSpace& s, const std::vector<cxd>& f,
                       const std::vector<cxd>& g) { return s.inner(f, g); })
      .def("norm", [](const wspace::WeightedSpace& s, const std::vector<cxd>& f) {
        return s.norm(f);
      });

  py::class_<wspace::Embedding>(m, "Embedding")
      .def(py::init<wspace::WeightedSpace, wspace::WeightedSpace, DenseMatrix>(),
           py::arg("src"), py::arg("dst"), py::arg("map"))
      .def_readonly("src", &wspace::Embedding::src)
      .def_readonly("dst", &wspace::Embedding::dst)
      .def_property_readonly("map", [](const wspace::Embedding& e) {
        return matrix_to_array(e.map);
      });

  py::class_<wspace::EmbeddingMetrics>(m, "EmbeddingMetrics")
      .def_readonly("j_norm", &wspace::EmbeddingMetrics::j_norm)
      .def_readonly("jstarj_defect", &wspace::EmbeddingMetrics::jstarj_defect)
      .def_readonly("jjstar_defect", &wspace::EmbeddingMetrics::jjstar_defect);

  py::class_<wspace::JcosReport>(m, "JcosReport")
      .def_readonly("residuals", &wspace::JcosReport::residuals)
      .def_readonly("all_within", &wspace::JcosReport::all_within);

  py::class_<wspace::JInverse>(m, "JInverse")
      .def_property_readonly("inverse", [](const wspace::JInverse& j) {
        return matrix_to_array(j.inverse);
      })
      .def_readonly("adjoint_gap", &wspace::JInverse::adjoint_gap)
      .def_readonly("two_sided", &wspace::JInverse::two_sided);

  m.def("adjoint_map", [](const wspace::Embedding& j) { return matrix_to_array(adjoint_map(j)); });
  m.def("embedding_metrics", &wspace::embedding_metrics);
  m.def("check_jcos", [](const wspace::Embedding& j, const std::vector<std::vector<cxd>>& set,
                         double tol) { return wspace::check_jcos(j, set, tol); },
        py::arg("embedding"), py::arg("test_set"), py::arg("tol"));
  m.def("j_inverse", &wspace::j_inverse);
  m.def("weighted_op_norm", [](const DenseMatrix& b, const wspace::WeightedSpace& src,
                               const wspace::WeightedSpace& dst) {
    return wspace::weighted_op_norm(b, src, dst);
  });
  m.def("make_test_dictionary", &wspace::make_test_dictionary, py::arg("space"),
        py::arg("n_sine") = 10, py::arg("n_random") = 10, py::arg("seed") = 0);

  // selfadj
  py::class_<selfadj::SpectrumWindow>(m, "SpectrumWindow")
      .def(py::init([](double lo, double hi, double guard) {
             return selfadj::SpectrumWindow{lo, hi, guard};
           }),
           py::arg("lo"), py::arg("hi"), py::arg("endpoint_guard") = 0.0)
      .def_readonly("lo", &selfadj::SpectrumWindow::lo)
      .def_readonly("hi", &selfadj::SpectrumWindow::hi);

  py::class_<selfadj::SelfAdjointOp, std::shared_ptr<selfadj::SelfAdjointOp>>(m, "SelfAdjointOp")
      .def(py::init<wspace::WeightedSpace, DenseMatrix>(), py::arg("space"), py::arg("form"))
      .def_property_readonly("dim", &selfadj::SelfAdjointOp::dim)
      .def_property_readonly("space", &selfadj::SelfAdjointOp::space)
      .def("spectrum", [](const selfadj::SelfAdjointOp& a) { return a.eigenvalues(); })
      .def("form_matrix", [](const selfadj::SelfAdjointOp& a) {
        return matrix_to_array(a.form_matrix());
      })
      .def("action", [](const selfadj::SelfAdjointOp& a) { return matrix_to_array(a.action()); });

  m.def("from_form", [](wspace::WeightedSpace space, const DenseMatrix& form) {
    return std::make_shared<selfadj::SelfAdjointOp>(std::move(space), form);
  });
  m.def("resolvent", [](const selfadj::SelfAdjointOp& a, cxd z) {
    return matrix_to_array(selfadj::resolvent(a, z));
  });
  m.def("func_calc", [](const selfadj::SelfAdjointOp& a, const std::function<cxd(double)>& f) {
    return matrix_to_array(selfadj::func_calc(a, f));
  });
  m.def("spectral_projection", [](const selfadj::SelfAdjointOp& a,
                                  const selfadj::SpectrumWindow& win) {
    const selfadj::Projection p = selfadj::spectral_projection(a, win);
    return py::make_tuple(matrix_to_array(p.matrix), p.rank);
  });
  m.def("spectral_measure", [](const selfadj::SelfAdjointOp& a, const std::vector<cxd>& psi,
                               const selfadj::SpectrumWindow& win) {
    return selfadj::spectral_measure(a, psi, win);
  });
  m.def("unitary_group", [](const selfadj::SelfAdjointOp& a, double t) {
    return matrix_to_array(selfadj::unitary_group(a, t));
  });
  m.def("heat_semigroup", [](const selfadj::SelfAdjointOp& a, double t) {
    return matrix_to_array(selfadj::heat_semigroup(a, t));
  });
  m.def("lower_bound", [](const selfadj::SelfAdjointOp& a) { return selfadj::lower_bound(a); });

  // expression grammar
  py::class_<expr::Expression>(m, "Expression")
      .def_static("parse", [](const std::string& text) { return expr::Expression::parse(text); })
      .def("eval", &expr::Expression::eval, py::arg("x"), py::arg("n") = 0.0)
      .def_property_readonly("text", &expr::Expression::text);

  // sturm
  py::class_<sturm::Coefficients>(m, "Coefficients")
      .def(py::init([](std::function<double(double)> w, std::function<double(double)> p,
                       std::function<double(double)> q, double delta, double gamma) {
             return sturm::Coefficients{std::move(w), std::move(p), std::move(q), delta, gamma};
           }),
           py::arg("w"), py::arg("p"), py::arg("q"), py::arg("delta"), py::arg("gamma"))
      .def_static("from_expressions", &coefficients_from_expressions, py::arg("w"), py::arg("p"),
                  py::arg("q"), py::arg("delta"), py::arg("gamma"), py::arg("n") = 0.0)
      .def_readonly("delta", &sturm::Coefficients::delta)
      .def_readonly("gamma", &sturm::Coefficients::gamma);

  py::class_<sturm::SLProblem>(m, "SLProblem")
      .def(py::init<wspace::Grid, sturm::Coefficients>(), py::arg("grid"), py::arg("coeffs"));

  m.def("discretize", [](const sturm::SLProblem& prob) {
    return std::make_shared<selfadj::SelfAdjointOp>(sturm::discretize(prob));
  });
  m.def("form_value", [](const sturm::SLProblem& prob, const std::vector<cxd>& f) {
    return sturm::form_value(prob, f);
  });
  m.def("factorize", [](const sturm::SLProblem& prob) {
    sturm::Factorization fac = sturm::factorize(prob);
    return py::make_tuple(matrix_to_array(fac.d_map), fac.staggered);
  });
  m.def("local_l1_bound", [](const std::function<double(double)>& q, double a, double b,
                             double resolution) { return sturm::local_l1_bound(q, a, b, resolution); });
  m.def("qfree_check", [](const sturm::SLProblem& prob, double eps, std::size_t samples,
                          double slack, std::uint64_t seed) {
    const sturm::QfreeReport rep = sturm::qfree_check(prob, eps, samples, slack, seed);
    return py::make_tuple(rep.holds, rep.worst_ratio);
  }, py::arg("problem"), py::arg("eps"), py::arg("sample_count") = 200,
     py::arg("slack") = 0.05, py::arg("seed") = 0);
  m.def("space_for", &sturm::space_for);
  m.def("make_embedding", [](const wspace::WeightedSpace& src, const wspace::WeightedSpace& dst) {
    return sturm::make_embedding(src, dst);
  });

  // conv
  py::enum_<conv::Mode>(m, "Mode").value("Norm", conv::Mode::Norm).value("Strong", conv::Mode::Strong);
  py::enum_<conv::SemigroupKind>(m, "SemigroupKind")
      .value("Unitary", conv::SemigroupKind::Unitary)
      .value("Heat", conv::SemigroupKind::Heat);

  py::class_<conv::ConvergencePair>(m, "ConvergencePair")
      .def(py::init<std::shared_ptr<const selfadj::SelfAdjointOp>,
                    std::shared_ptr<const selfadj::SelfAdjointOp>, wspace::Embedding>(),
           py::arg("limit"), py::arg("approx"), py::arg("embedding"));

  m.def("nrc_distance", &conv::nrc_distance, py::arg("pair"), py::arg("z") = cxd(0.0, 1.0));
  m.def("nrc_distance_alt", &conv::nrc_distance_alt, py::arg("pair"), py::arg("z") = cxd(0.0, 1.0));
  m.def("src_residuals", [](const conv::ConvergencePair& pair, cxd z,
                            const std::vector<std::vector<cxd>>& set) {
    const conv::StrongResiduals r = conv::src_residuals(pair, z, set);
    return py::make_tuple(r.pullback, r.intertwine, r.dominated);
  });
  m.def("fcalc_distance", [](const conv::ConvergencePair& pair,
                             const std::function<cxd(double)>& f, conv::Mode mode,
                             const std::vector<std::vector<cxd>>& set) {
    const conv::FcalcDistance d = conv::fcalc_distance(pair, f, mode, set);
    return py::make_tuple(d.norm_distance, d.residuals);
  }, py::arg("pair"), py::arg("f"), py::arg("mode") = conv::Mode::Norm,
     py::arg("test_set") = std::vector<std::vector<cxd>>{});
  m.def("semigroup_distance", [](const conv::ConvergencePair& pair, double t,
                                 conv::SemigroupKind kind, conv::Mode mode,
                                 const std::vector<std::vector<cxd>>& set) {
    const conv::SemigroupDistance d = conv::semigroup_distance(pair, t, kind, mode, set);
    return py::make_tuple(d.norm_distance, d.residuals, d.lower_bound_limit, d.lower_bound_approx);
  }, py::arg("pair"), py::arg("t"), py::arg("kind"), py::arg("mode") = conv::Mode::Norm,
     py::arg("test_set") = std::vector<std::vector<cxd>>{});
  m.def("relbound_certificate", [](const conv::ConvergencePair& pair) {
    const conv::RelboundCertificate c = conv::relbound_certificate(pair);
    return py::make_tuple(c.certificate, c.nrc_i, c.bound_ok);
  });
  m.def("form_delta", &conv::form_delta, py::arg("pair"), py::arg("gamma"));
  m.def("sandwich_operator", [](const conv::ConvergencePair& pair) {
    return std::make_shared<selfadj::SelfAdjointOp>(conv::sandwich_operator(pair));
  });
  m.def("spectra_inclusion_gap", &conv::spectra_inclusion_gap);
  m.def("spectra_hausdorff", &conv::spectra_hausdorff);
  m.def("projection_diagnostics", [](const conv::ConvergencePair& pair,
                                     const selfadj::SpectrumWindow& win,
                                     const std::vector<std::vector<cxd>>& set) {
    const conv::ProjectionDiagnostics d = conv::projection_diagnostics(pair, win, set);
    return py::make_tuple(d.residuals, d.rank_limit, d.rank_approx, d.rank_inequality_ok);
  });
  m.def("ess_window_count", [](const selfadj::SelfAdjointOp& op, double lambda, double eps) {
    return conv::ess_window_count(op, lambda, eps);
  });
  m.def("weak_residuals", [](const conv::ConvergencePair& pair, cxd z,
                             const std::vector<std::pair<std::vector<cxd>, std::vector<cxd>>>& probes) {
    const conv::WeakResiduals w = conv::weak_residuals(pair, z, probes);
    return py::make_tuple(w.weak, w.strong);
  });

  // expcli
  py::class_<expcli::Scenario>(m, "Scenario")
      .def_readonly("name", &expcli::Scenario::name)
      .def_readonly("m", &expcli::Scenario::m)
      .def_readonly("ns", &expcli::Scenario::ns)
      .def_readwrite("seed", &expcli::Scenario::seed)
      .def("columns", &expcli::Scenario::columns);

  py::class_<expcli::Verdict>(m, "Verdict")
      .def_readonly("name", &expcli::Verdict::name)
      .def_readonly("pass_", &expcli::Verdict::pass)
      .def_readonly("measured", &expcli::Verdict::measured);

  py::class_<conv::ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("family_index", &conv::ConvergenceReport::family_index)
      .def_readonly("nrc", &conv::ConvergenceReport::nrc)
      .def_readonly("nrc_alt", &conv::ConvergenceReport::nrc_alt)
      .def_readonly("src_max", &conv::ConvergenceReport::src_max)
      .def_readonly("hausdorff", &conv::ConvergenceReport::hausdorff)
      .def_readonly("relbound_cert", &conv::ConvergenceReport::relbound_cert)
      .def_readonly("form_delta", &conv::ConvergenceReport::form_delta)
      .def_property_readonly("fcalc", [](const conv::ConvergenceReport& r) {
        py::dict out;
        for (const auto& [name, value] : r.fcalc) out[py::str(name)] = value;
        return out;
      });

  py::class_<expcli::SweepResult>(m, "SweepResult")
      .def_readonly("rows", &expcli::SweepResult::rows)
      .def_readonly("verdicts", &expcli::SweepResult::verdicts)
      .def("all_pass", &expcli::SweepResult::all_pass)
      .def("csv", [](const expcli::SweepResult& r) { return expcli::format_csv(r); });

  m.def("load_scenario", &expcli::load_scenario, py::arg("path"));
  m.def("scenario_from_text", &expcli::scenario_from_text, py::arg("text"),
        py::arg("origin") = "<memory>");
  m.def("run_sweep", [](const expcli::Scenario& s, int threads, bool timing) {
    return expcli::run_sweep(s, {threads, timing});
  }, py::arg("scenario"), py::arg("threads") = 0, py::arg("timing") = false,
     py::call_guard<py::gil_scoped_release>());
  m.def("emit", [](const expcli::SweepResult& r, const std::string& dir) {
    expcli::emit(r, dir);
  });
  m.def("verify", [](const expcli::Scenario& s, int threads) {
    return expcli::verify(s, {threads, false});
  }, py::arg("scenario"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("member_spectrum", &expcli::member_spectrum, py::arg("scenario"), py::arg("n"));
}
