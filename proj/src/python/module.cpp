#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <vector>

#include "mhlab/errors.hpp"
#include "mhlab/geometry.hpp"
#include "mhlab/hardy.hpp"
#include "mhlab/partition.hpp"
#include "mhlab/spectrum.hpp"
#include "mhlab/version.hpp"
#include "mhlab/weights.hpp"

namespace py = pybind11;

namespace {

mhlab::PoleConfiguration make_configuration(
    const std::vector<std::vector<double>>& points, int dimension, double r0) {
  return mhlab::build_configuration(points, dimension, r0);
}

mhlab::WeightSpec make_weight_spec(
    const std::vector<std::vector<double>>& points, int dimension,
    double gamma, double delta, double m, double k1, double k2, double r0) {
  mhlab::WeightSpec spec;
  spec.gamma = gamma;
  spec.delta = delta;
  spec.m = m;
  spec.k1 = k1;
  spec.k2 = k2;
  spec.poles = mhlab::build_configuration(points, dimension, r0);
  mhlab::validate_weight_spec(spec);
  return spec;
}

}  // namespace

PYBIND11_MODULE(mhlab, mod) {
  mod.doc() = "weighted multipolar Hardy inequality laboratory";
  mod.attr("__version__") = mhlab::kToolVersion;

  py::register_exception<mhlab::Error>(mod, "MhlabError");

  py::class_<mhlab::PoleConfiguration>(mod, "PoleConfiguration")
      .def_readonly("dimension", &mhlab::PoleConfiguration::dimension)
      .def_readonly("r0", &mhlab::PoleConfiguration::r0)
      .def("count", &mhlab::PoleConfiguration::count);
  mod.def("configuration", &make_configuration, py::arg("points"),
          py::arg("dimension"), py::arg("r0") = 1.0,
          "Build a pole configuration from a list of points");

  py::class_<mhlab::WeightSpec>(mod, "WeightSpec")
      .def_readonly("gamma", &mhlab::WeightSpec::gamma)
      .def_readonly("delta", &mhlab::WeightSpec::delta)
      .def_readonly("m", &mhlab::WeightSpec::m)
      .def_readonly("k1", &mhlab::WeightSpec::k1)
      .def_readonly("k2", &mhlab::WeightSpec::k2);
  mod.def("weight_spec", &make_weight_spec, py::arg("points"),
          py::arg("dimension"), py::arg("gamma") = 0.0, py::arg("delta") = 0.0,
          py::arg("m") = 2.0, py::arg("k1") = 0.0, py::arg("k2") = 0.0,
          py::arg("r0") = 1.0,
          "Build and validate a weight from the built-in family");

  mod.def("hardy_constant", &mhlab::hardy_constant, py::arg("dimension"),
          py::arg("k2") = 0.0, "((N + k2 - 2)/2)^2");
  mod.def("beta_cross_max", &mhlab::beta_cross_max, py::arg("poles"),
          py::arg("dimension"), py::arg("k2") = 0.0);
  mod.def("choose_eta", &mhlab::choose_eta, py::arg("c"), py::arg("dimension"),
          py::arg("k2") = 0.0,
          "Witness exponent for a supercritical constant");
  mod.def("ims_remainder", &mhlab::ims_remainder, py::arg("poles"),
          py::arg("c"), py::arg("r0"), py::arg("k0"), py::arg("k1") = 0.0);
  mod.def(
      "vector_field_constants",
      [](int n, double c, double r0, double epsilon, double k1, int N,
         double k2) {
        mhlab::VectorFieldConstants vf =
            mhlab::vector_field_constants(n, c, r0, epsilon, k1, N, k2);
        py::dict d;
        d["K"] = vf.K;
        d["beta_plus"] = vf.beta_plus;
        d["beta_minus"] = vf.beta_minus;
        d["c_max"] = vf.c_max;
        d["epsilon"] = vf.epsilon;
        return d;
      },
      py::arg("poles"), py::arg("c"), py::arg("r0"), py::arg("epsilon"),
      py::arg("k1") = 0.0, py::arg("dimension") = 3, py::arg("k2") = 0.0);

  mod.def(
      "eval_profile",
      [](double t) {
        mhlab::ProfileValue p = mhlab::eval_profile(t);
        return py::make_tuple(p.value, p.derivative);
      },
      py::arg("t"), "Partition profile value and derivative at radius t");
  mod.def(
      "compute_k0",
      [](const mhlab::PoleConfiguration& config, double c) {
        return mhlab::compute_k0(mhlab::build_partition(config), c);
      },
      py::arg("configuration"), py::arg("c"));

  mod.def(
      "multipolar_potential",
      [](const mhlab::PoleConfiguration& config,
         const std::vector<double>& x) {
        return mhlab::multipolar_potential(config, x);
      },
      py::arg("configuration"), py::arg("x"), "sum_i 1/|x - a_i|^2");
  mod.def(
      "cross_term_residual",
      [](const mhlab::PoleConfiguration& config,
         const std::vector<double>& x) {
        return mhlab::cross_term_residual(config, x);
      },
      py::arg("configuration"), py::arg("x"));

  mod.def(
      "eval_weight",
      [](const mhlab::WeightSpec& spec, const std::vector<double>& x) {
        return mhlab::eval_weight(spec, x);
      },
      py::arg("spec"), py::arg("x"));
  mod.def(
      "eval_log_gradient",
      [](const mhlab::WeightSpec& spec, const std::vector<double>& x) {
        std::vector<double> g(x.size());
        mhlab::eval_log_gradient(spec, x, g);
        return g;
      },
      py::arg("spec"), py::arg("x"));

  mod.def(
      "admissibility_constants",
      [](const mhlab::WeightSpec& spec, double rho) {
        mhlab::AdmissibilityConstants ac =
            mhlab::admissibility_constants(spec, rho);
        py::dict d;
        d["c_rho"] = ac.c_rho;
        d["c1"] = ac.c1;
        d["c2"] = ac.c2;
        d["c3"] = ac.c3;
        d["c4"] = ac.c4;
        d["gamma_upper"] = ac.gamma_upper;
        d["gamma_lower"] = ac.gamma_lower;
        return d;
      },
      py::arg("spec"), py::arg("rho"));

  mod.def(
      "estimate_critical_exponent",
      [](const mhlab::WeightSpec& spec, int pole_index,
         const std::vector<double>& radii) {
        return mhlab::estimate_critical_exponent(spec, pole_index, radii);
      },
      py::arg("spec"), py::arg("pole_index"), py::arg("radii"),
      "Fitted local integrability exponent at a pole");
  mod.def(
      "check_density_condition",
      [](const mhlab::WeightSpec& spec, double p, int pole_index,
         const std::vector<double>& deltas) {
        return mhlab::check_density_condition(spec, p, pole_index, deltas)
            .verdict;
      },
      py::arg("spec"), py::arg("p"), py::arg("pole_index"),
      py::arg("deltas"));

  mod.def(
      "witness_quotient",
      [](const mhlab::WeightSpec& spec, int pole_index, double eta,
         double epsilon, double c) {
        mhlab::WitnessSpec w;
        w.pole_index = pole_index;
        w.eta = eta;
        w.epsilon = epsilon;
        return mhlab::witness_quotient(spec, spec.poles, w, c);
      },
      py::arg("spec"), py::arg("pole_index"), py::arg("eta"),
      py::arg("epsilon"), py::arg("c"),
      "Rayleigh quotient of the supercritical witness");
}
