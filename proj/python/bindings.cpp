#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "sobol_eff/core.hpp"
#include "sobol_eff/givendata.hpp"
#include "sobol_eff/harness.hpp"
#include "sobol_eff/io.hpp"
#include "sobol_eff/models.hpp"
#include "sobol_eff/pickfreeze.hpp"

namespace py = pybind11;
using namespace sobol_eff;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

GivenDataSample to_givendata(const DoubleArray& x, const DoubleArray& y) {
  if (x.ndim() != 1 && x.ndim() != 2) throw InvalidArgument("x must be 1-d or 2-d");
  const std::size_t d = x.ndim() == 1 ? 1 : static_cast<std::size_t>(x.shape(1));
  return GivenDataSample({x.data(), x.data() + x.size()}, d, to_vector(y));
}

py::array_t<double> to_array(std::span<const double> v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

GdEstimatorConfig make_gd_config(const std::string& estimator, std::optional<std::size_t> k,
                                 std::size_t folds, std::uint64_t seed) {
  GdEstimatorConfig cfg;
  if (estimator == "onestep") {
    cfg.regression = GdRegression::knn;
  } else if (estimator == "rank") {
    cfg.regression = GdRegression::rank_pairing;
  } else {
    throw InvalidArgument("estimator must be 'onestep' or 'rank'");
  }
  cfg.k = k;
  cfg.folds = folds;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sobol' index estimators with efficient influence-function variances";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DegenerateVariance>(m, "DegenerateVariance", base);
  py::register_exception<InvalidLevel>(m, "InvalidLevel", base);
  py::register_exception<InvalidK>(m, "InvalidK", base);
  py::register_exception<InsufficientData>(m, "InsufficientData", base);
  py::register_exception<MissingTruth>(m, "MissingTruth", base);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);

  py::enum_<Method>(m, "Method")
      .value("pick_freeze", Method::pick_freeze)
      .value("given_data_onestep", Method::given_data_onestep)
      .value("given_data_rank", Method::given_data_rank);

  py::class_<MomentVector>(m, "MomentVector")
      .def(py::init<double, double, double>(), py::arg("psi"), py::arg("mu"), py::arg("m2"))
      .def_readwrite("psi", &MomentVector::psi)
      .def_readwrite("mu", &MomentVector::mu)
      .def_readwrite("m2", &MomentVector::m2)
      .def("__repr__", [](const MomentVector& v) {
        return "MomentVector(psi=" + format_double(v.psi) + ", mu=" + format_double(v.mu) +
               ", m2=" + format_double(v.m2) + ")";
      });

  py::class_<SobolEstimate>(m, "SobolEstimate")
      .def_readonly("point", &SobolEstimate::point)
      .def_readonly("asym_variance", &SobolEstimate::asym_variance)
      .def_readonly("ci_low", &SobolEstimate::ci_low)
      .def_readonly("ci_high", &SobolEstimate::ci_high)
      .def_readonly("level", &SobolEstimate::level)
      .def_readonly("n", &SobolEstimate::n)
      .def_readonly("method", &SobolEstimate::method)
      .def("to_dict", [](const SobolEstimate& e) { return to_python(to_json(e)); });

  m.def("sobol_from_moments", &sobol_from_moments, py::arg("moments"));
  m.def("phi_gradient", &phi_gradient, py::arg("moments"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));
  m.def(
      "wald_interval",
      [](double point, double asym_variance, std::size_t n, double level) {
        return wald_interval(point, asym_variance, n, ConfidenceConfig{level});
      },
      py::arg("point"), py::arg("asym_variance"), py::arg("n"), py::arg("level") = 0.95);

  m.def(
      "empirical_moments_pf",
      [](const DoubleArray& y, const DoubleArray& y_pf) {
        return empirical_moments_pf(PickFreezeSample(to_vector(y), to_vector(y_pf)));
      },
      py::arg("y"), py::arg("y_pf"));
  m.def("pf_sobol_influence", &pf_sobol_influence, py::arg("y1"), py::arg("y2"),
        py::arg("moments"));
  m.def(
      "estimate_sobol_pf",
      [](const DoubleArray& y, const DoubleArray& y_pf, double level) {
        return estimate_sobol_pf(PickFreezeSample(to_vector(y), to_vector(y_pf)),
                                 ConfidenceConfig{level});
      },
      py::arg("y"), py::arg("y_pf"), py::arg("level") = 0.95);

  m.def("gd_influence", &gd_influence, py::arg("y"), py::arg("m_value"), py::arg("psi"));
  m.def(
      "psi_rank_pairing",
      [](const DoubleArray& x, const DoubleArray& y) {
        return psi_rank_pairing(to_givendata(x, y));
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "psi_onestep",
      [](const DoubleArray& x, const DoubleArray& y, std::optional<std::size_t> k,
         std::size_t folds, std::uint64_t seed) {
        return psi_onestep(to_givendata(x, y), make_gd_config("onestep", k, folds, seed));
      },
      py::arg("x"), py::arg("y"), py::arg("k") = py::none(), py::arg("folds") = 2,
      py::arg("seed") = 0);
  m.def(
      "estimate_sobol_gd",
      [](const DoubleArray& x, const DoubleArray& y, const std::string& estimator,
         std::optional<std::size_t> k, std::size_t folds, std::uint64_t seed, double level) {
        const auto s = to_givendata(x, y);
        const auto detail = estimate_sobol_gd_detailed(
            s, make_gd_config(estimator, k, folds, seed), ConfidenceConfig{level});
        return to_python(to_json(detail, s.dim()));
      },
      py::arg("x"), py::arg("y"), py::arg("estimator") = "onestep", py::arg("k") = py::none(),
      py::arg("folds") = 2, py::arg("seed") = 0, py::arg("level") = 0.95);

  m.def(
      "model_truth",
      [](const std::string& spec) -> py::object {
        const auto model = make_model(spec);
        if (!model.truth) return py::none();
        py::dict d;
        d["s_true"] = model.truth->s_true;
        d["psi_true"] = model.truth->psi_true;
        d["mu_true"] = model.truth->mu_true;
        d["m2_true"] = model.truth->m2_true;
        return d;
      },
      py::arg("model"));
  m.def(
      "sample_pickfreeze",
      [](const std::string& spec, std::size_t n, std::uint64_t seed, std::uint32_t replication) {
        const auto s = sample_pickfreeze(make_model(spec), n, {seed, replication});
        return py::make_tuple(to_array(s.y()), to_array(s.y_pf()));
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("replication") = 0);
  m.def(
      "sample_givendata",
      [](const std::string& spec, std::size_t n, std::uint64_t seed, std::uint32_t replication) {
        const auto s = sample_givendata(make_model(spec), n, {seed, replication});
        py::array_t<double> x({static_cast<py::ssize_t>(s.size()),
                               static_cast<py::ssize_t>(s.dim())});
        std::copy(s.x().begin(), s.x().end(), x.mutable_data());
        return py::make_tuple(x, to_array(s.y()));
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 0, py::arg("replication") = 0);
  m.def(
      "efficiency_bound",
      [](const std::string& spec, const std::string& setting, std::size_t mc_budget,
         std::uint64_t seed) {
        const auto b = efficiency_bound(make_model(spec), parse_setting(setting), mc_budget,
                                        {seed, 0});
        return py::make_tuple(b.bound, b.std_error);
      },
      py::arg("model"), py::arg("setting"), py::arg("mc_budget") = 1'000'000,
      py::arg("seed") = 0);

  m.def(
      "run_replications",
      [](const std::string& spec, const std::string& setting, std::size_t n, std::size_t reps,
         std::uint64_t seed, const std::string& estimator, std::optional<std::size_t> k,
         std::size_t folds, std::size_t bound_budget, unsigned threads) {
        EstimatorSpec es{parse_setting(setting), make_gd_config(estimator, k, folds, 0)};
        HarnessOptions opts;
        opts.bound_budget = bound_budget;
        opts.threads = threads;
        ReplicationReport rep;
        {
          py::gil_scoped_release release;
          rep = run_replications(make_model(spec), es, n, reps, seed, opts);
        }
        return to_python(to_json(rep));
      },
      py::arg("model"), py::arg("setting"), py::arg("n"), py::arg("reps"), py::arg("seed") = 0,
      py::arg("estimator") = "onestep", py::arg("k") = py::none(), py::arg("folds") = 2,
      py::arg("bound_budget") = 1'000'000, py::arg("threads") = 0);
  m.def(
      "expansion_check",
      [](const std::string& spec, const std::string& setting, std::vector<std::size_t> n_values,
         std::size_t reps, std::uint64_t seed, const std::string& estimator,
         std::optional<std::size_t> k, std::size_t folds, unsigned threads) {
        EstimatorSpec es{parse_setting(setting), make_gd_config(estimator, k, folds, 0)};
        HarnessOptions opts;
        opts.threads = threads;
        ExpansionReport rep;
        {
          py::gil_scoped_release release;
          rep = expansion_check(make_model(spec), es, n_values, reps, seed, opts);
        }
        return to_python(to_json(rep));
      },
      py::arg("model"), py::arg("setting"), py::arg("n_values"), py::arg("reps"),
      py::arg("seed") = 0, py::arg("estimator") = "onestep", py::arg("k") = py::none(),
      py::arg("folds") = 2, py::arg("threads") = 0);
}
