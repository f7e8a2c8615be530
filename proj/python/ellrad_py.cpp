#include "ellrad/bounds.hpp"
#include "ellrad/concentration.hpp"
#include "ellrad/errors.hpp"
#include "ellrad/experiments.hpp"
#include "ellrad/geometry.hpp"
#include "ellrad/json_io.hpp"
#include "ellrad/randmat.hpp"
#include "ellrad/recovery.hpp"
#include "ellrad/sequences.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ellrad;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict report_dict(const BoundReport& r) {
  return py::module_::import("json").attr("loads")(to_json(r).dump());
}

py::dict check_dict(const TailCheck& t) {
  return py::module_::import("json").attr("loads")(to_json(t).dump());
}

SolverOptions solver_options(Eigen::Index dense_cap, double tol, const std::string& method) {
  SolverOptions o;
  o.dense_cap = dense_cap;
  o.tol = tol;
  if (method == "dense") o.method = SolveMethod::dense;
  else if (method == "iterative") o.method = SolveMethod::iterative;
  else if (method != "auto") throw std::invalid_argument("method must be 'auto', 'dense' or 'iterative'");
  return o;
}

}  // namespace

PYBIND11_MODULE(_ellrad, m) {
  m.doc() = "Radii of random ellipsoid sections and least-squares recovery from Gaussian information";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<RankDeficientError>(m, "RankDeficientError", PyExc_ArithmeticError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);

  py::class_<SemiAxes>(m, "SemiAxes")
      .def_static("polynomial", &SemiAxes::polynomial, py::arg("alpha"), py::arg("beta"), py::arg("m"),
                  py::arg("scale") = 1.0)
      .def_static("exponential", &SemiAxes::exponential, py::arg("a"), py::arg("m"), py::arg("scale") = 1.0)
      .def_static("from_values", &SemiAxes::from_values, py::arg("values"), py::arg("scale") = 1.0)
      .def_static("from_json", [](const std::string& text) { return semiaxes_from_json(json::parse(text)); })
      .def("to_json", [](const SemiAxes& s) { return to_json(s).dump(); })
      .def_property_readonly("m", &SemiAxes::m)
      .def_property_readonly("scale", &SemiAxes::scale)
      .def_property_readonly("support", &SemiAxes::support)
      .def_property_readonly("values", [](const SemiAxes& s) { return to_vector(s.values()); })
      .def("sigma", &SemiAxes::sigma, py::arg("j"))
      .def("tail_sq", &SemiAxes::tail_sq, py::arg("k"))
      .def("neglected_tail_sq", &SemiAxes::neglected_tail_sq)
      .def("with_m", &SemiAxes::with_m, py::arg("m"))
      .def("scaled", &SemiAxes::scaled, py::arg("c"));

  m.def("c_k", &c_k, py::arg("seq"), py::arg("k"));
  m.def("n_zero", &n_zero, py::arg("seq"), py::arg("eps"));

  py::class_<GaussianInfo>(m, "GaussianInfo")
      .def(py::init<std::uint64_t, std::int64_t, std::int64_t>(), py::arg("seed"), py::arg("n"), py::arg("m"))
      .def_property_readonly("seed", &GaussianInfo::seed)
      .def_property_readonly("n", &GaussianInfo::n)
      .def_property_readonly("m", &GaussianInfo::m)
      .def("entry", &GaussianInfo::entry, py::arg("i"), py::arg("j"))
      .def("matrix", [](const GaussianInfo& g) { return g.block(0, g.n(), 0, g.m()); });
  m.def("sample", &sample, py::arg("seed"), py::arg("n"), py::arg("m"), py::arg("memory_cap") = kDefaultMemoryCap);

  m.def("singular_values",
        [](const Eigen::MatrixXd& a, bool iterative, double tol) {
          return singular_values(a, iterative ? SvMode::extreme_iterative : SvMode::all_dense, tol);
        },
        py::arg("a"), py::arg("iterative") = false, py::arg("tol") = 1e-10);
  m.def("kernel_projector_apply",
        [](const Eigen::MatrixXd& s, const Eigen::VectorXd& v, double tol) { return kernel_projector_apply(s, v, tol); },
        py::arg("s"), py::arg("v"), py::arg("tol") = -1.0);

  m.def("section_radius",
        [](const SemiAxes& seq, const GaussianInfo& g, Eigen::Index dense_cap, double tol, const std::string& method) {
          const SectionRadius r = section_radius(seq, g, solver_options(dense_cap, tol, method));
          py::dict d;
          d["radius"] = r.value;
          d["n"] = r.n;
          d["m"] = r.m;
          d["method"] = to_string(r.method);
          d["iterations"] = r.iterations;
          d["residual"] = r.residual;
          d["degenerate"] = r.degenerate;
          return d;
        },
        py::arg("seq"), py::arg("g"), py::arg("dense_cap") = kDefaultDenseCap, py::arg("tol") = 1e-10,
        py::arg("method") = "auto");
  m.def("coordinate_radius", &coordinate_radius, py::arg("seq"), py::arg("g"), py::arg("k"));
  m.def("ball_coordinate_sq", &ball_coordinate_sq, py::arg("g"));

  m.def("apply_estimator",
        [](const GaussianInfo& g, std::int64_t k, const Eigen::VectorXd& x) {
          return apply_estimator(g, EstimatorSpec{k}, x);
        },
        py::arg("g"), py::arg("k"), py::arg("x"));
  m.def("worst_case_error",
        [](const SemiAxes& seq, const GaussianInfo& g, std::int64_t k, Eigen::Index dense_cap, double tol,
           const std::string& method) {
          return worst_case_error(seq, g, EstimatorSpec{k}, solver_options(dense_cap, tol, method));
        },
        py::arg("seq"), py::arg("g"), py::arg("k"), py::arg("dense_cap") = kDefaultDenseCap,
        py::arg("tol") = 1e-10, py::arg("method") = "auto");
  m.def("optimal_radius", &optimal_radius, py::arg("seq"), py::arg("n"));

  m.def("ub_main", [](const SemiAxes& s, std::int64_t n) { return report_dict(ub_main(s, n)); },
        py::arg("seq"), py::arg("n"));
  m.def("ub_exponential",
        [](const SemiAxes& s, std::int64_t n, double c, double sv) { return report_dict(ub_exponential(s, n, c, sv)); },
        py::arg("seq"), py::arg("n"), py::arg("c") = 1.0, py::arg("s") = 10.0);
  m.def("lb_main", [](const SemiAxes& s, std::int64_t n, double eps) { return report_dict(lb_main(s, n, eps)); },
        py::arg("seq"), py::arg("n"), py::arg("eps") = 0.5);
  m.def("realization_ub",
        [](const SemiAxes& s, const GaussianInfo& g, std::int64_t k) { return report_dict(realization_ub(s, g, k)); },
        py::arg("seq"), py::arg("g"), py::arg("k"));
  m.def("bvh_threshold", &bvh_threshold, py::arg("seq"), py::arg("n"), py::arg("k"), py::arg("c") = 1.0);
  m.def("gordon_an", &gordon_an, py::arg("n"));
  m.def("mstar_estimate",
        [](const SemiAxes& s, std::int64_t samples, std::uint64_t seed) {
          const auto e = mstar_estimate(s, samples, seed);
          return py::make_tuple(e.estimate, e.std_error);
        },
        py::arg("seq"), py::arg("samples"), py::arg("seed"));
  m.def("elementary_lb", &elementary_lb, py::arg("m"), py::arg("n"), py::arg("eps"), py::arg("sigma_m"),
        py::arg("alpha"));

  m.def("check_laurent_massart",
        [](const std::vector<double>& a, double delta, std::int64_t trials, std::uint64_t seed, int threads) {
          const auto [lo, hi] = check_laurent_massart(a, delta, trials, seed, threads);
          return py::make_tuple(check_dict(lo), check_dict(hi));
        },
        py::arg("a"), py::arg("delta"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1);
  m.def("check_davidson_szarek",
        [](std::int64_t n, std::int64_t trials, std::uint64_t seed, int threads) {
          return check_dict(check_davidson_szarek(n, trials, seed, threads));
        },
        py::arg("n"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1);
  m.def("check_szarek",
        [](std::int64_t n, double t, std::int64_t trials, std::uint64_t seed, int threads) {
          return check_dict(check_szarek(n, t, trials, seed, threads));
        },
        py::arg("n"), py::arg("t"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1);

  m.def("run_sweep",
        [](const std::string& config_json) {
          const SweepConfig cfg = sweep_config_from_json(json::parse(config_json));
          std::string csv, summary;
          {
            py::gil_scoped_release release;
            const SweepResult res = run_sweep(cfg);
            csv = to_csv(res.records);
            summary = to_json(res.summary).dump();
          }
          return py::make_tuple(csv, summary);
        },
        py::arg("config_json"),
        "Runs a sweep; returns (csv_text, summary_json_text).");
  m.attr("CSV_HEADER") = kCsvHeader;
}
