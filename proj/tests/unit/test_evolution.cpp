#include <doctest.h>

#include <mhlab/errors.hpp>
#include <mhlab/evolution.hpp>
#include <mhlab/geometry.hpp>
#include <mhlab/spectrum.hpp>
#include <mhlab/weights.hpp>

#include <cmath>
#include <vector>

using mhlab::assemble;
using mhlab::build_configuration;
using mhlab::ControlBox;
using mhlab::default_control_box;
using mhlab::default_initial_bump;
using mhlab::EvolutionTrace;
using mhlab::EvolveOptions;
using mhlab::MeshParams;

namespace {

mhlab::PoleConfiguration two_poles() {
  return build_configuration({{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 3, 1.0);
}

mhlab::WeightSpec lebesgue(const mhlab::PoleConfiguration& poles) {
  mhlab::WeightSpec spec;
  spec.poles = poles;
  return spec;
}

MeshParams coarse_mesh() {
  MeshParams params;
  params.box_half_width = 3.0;
  params.panels_per_axis = 6;
  params.grading_layers = 3;
  params.pole_cell_levels = 8;
  return params;
}

mhlab::DiscreteForms heat_forms(double c) {
  auto poles = two_poles();
  return assemble(lebesgue(poles), poles, c, coarse_mesh());
}

Eigen::VectorXd normalized_bump(const mhlab::DiscreteForms& forms) {
  auto u0 = forms.interpolate(
      default_initial_bump(forms.config(), forms.params().box_half_width));
  double m = std::sqrt(u0.dot(forms.mass().asDiagonal() * u0));
  return u0 / m;
}

EvolutionTrace synthetic_trace(const std::function<double(double)>& norm_fn,
                               int samples, double T) {
  EvolutionTrace trace;
  trace.dt = T / (samples - 1);
  for (int k = 0; k < samples; ++k) {
    double t = trace.dt * k;
    trace.times.push_back(t);
    trace.norms.push_back(norm_fn(t));
    trace.min_on_K.push_back(1.0);
  }
  trace.steps_completed = samples - 1;
  return trace;
}

}  // namespace

TEST_CASE("default_control_box keeps its distance from every pole") {
  for (auto poles :
       {two_poles(), build_configuration({{0.0, 0.0, 0.0}}, 3, 1.0)}) {
    auto box = default_control_box(poles);
    REQUIRE_FALSE(box.empty());
    for (const auto& pole : poles.poles) {
      double gap_sq = 0.0;
      for (int d = 0; d < poles.dimension; ++d) {
        double gap = 0.0;
        if (pole[d] < box.lo[d]) gap = box.lo[d] - pole[d];
        if (pole[d] > box.hi[d]) gap = pole[d] - box.hi[d];
        gap_sq += gap * gap;
      }
      CHECK(std::sqrt(gap_sq) >= 0.5 * poles.r0 - 1e-12);
    }
  }
}

TEST_CASE("pure heat flow is an M-norm contraction") {
  auto forms = heat_forms(0.0);
  auto u0 = normalized_bump(forms);
  auto run = mhlab::evolve(forms, u0, 0.05, 5e-3);
  CHECK_FALSE(run.trace.breakdown);
  REQUIRE(run.trace.norms.size() >= 2);
  for (size_t k = 1; k < run.trace.norms.size(); ++k) {
    CHECK(run.trace.norms[k] <= run.trace.norms[k - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("implicit Euler satisfies the discrete energy identity") {
  auto forms = heat_forms(0.25);
  auto u0 = normalized_bump(forms);
  EvolveOptions opts;
  opts.record_states = true;
  double dt = 5e-3;
  auto run = mhlab::evolve(forms, u0, 0.03, dt, opts);
  REQUIRE_FALSE(run.trace.breakdown);
  REQUIRE(run.states.size() == run.trace.times.size());

  auto A = forms.system();
  auto M = forms.mass();
  for (size_t k = 1; k < run.states.size(); ++k) {
    const auto& u = run.states[k - 1];
    const auto& up = run.states[k];
    // (M + dt A) u_{k+1} = M u_k, tested in quadratic-form shape.
    double lhs = up.dot(M.asDiagonal() * (up - u)) / dt + up.dot(A * up);
    double scale = std::abs(up.dot(A * up)) + up.dot(M.asDiagonal() * up) / dt;
    CHECK(std::abs(lhs) <= 1e-8 * (1.0 + scale));
  }
}

TEST_CASE("heat flow from a nonnegative bump stays positive on the control box") {
  auto forms = heat_forms(0.0);
  auto u0 = normalized_bump(forms);
  EvolveOptions opts;
  opts.record_states = true;
  auto run = mhlab::evolve(forms, u0, 0.05, 5e-3, opts);
  REQUIRE_FALSE(run.trace.breakdown);
  auto rep = mhlab::positivity_check(forms, run, ControlBox{}, u0);
  CHECK(rep.verdict == "positive");
  CHECK(rep.min_ratio > 0.0);
}

TEST_CASE("positivity_check handles zero data and a bad control box") {
  auto forms = heat_forms(0.0);
  auto u0 = normalized_bump(forms);
  auto run = mhlab::evolve(forms, u0, 0.02, 5e-3);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(forms.dof_count());
  auto rep = mhlab::positivity_check(forms, run, ControlBox{}, zero);
  CHECK(rep.verdict == "zero initial data");

  ControlBox hugging;
  hugging.lo = {-1.05, -0.05, -0.05};
  hugging.hi = {-0.95, 0.05, 0.05};
  CHECK_THROWS_WITH_AS(mhlab::positivity_check(forms, run, hugging, u0),
                       doctest::Contains("control box too close to a pole"),
                       mhlab::Error);
}

TEST_CASE("decay rate stays consistent with the spectral bound") {
  auto forms = heat_forms(0.25);
  auto spec_res = mhlab::lambda1(forms);
  REQUIRE(spec_res.verdict == "converged");

  auto u0 = normalized_bump(forms);
  auto run = mhlab::evolve(forms, u0, 0.1, 2e-3);
  REQUIRE_FALSE(run.trace.breakdown);
  auto fit = mhlab::fit_exponential_bound(run.trace);
  // Implicit Euler under-shoots the decay slightly; the fitted rate must
  // not beat -lambda1 by more than bias room.
  CHECK(fit.omega <= -spec_res.lambda1 +
                         0.05 * std::abs(spec_res.lambda1) + 0.05);
}

TEST_CASE("evolve is bitwise deterministic") {
  auto forms = heat_forms(0.25);
  auto u0 = normalized_bump(forms);
  auto a = mhlab::evolve(forms, u0, 0.02, 2e-3);
  auto b = mhlab::evolve(forms, u0, 0.02, 2e-3);
  REQUIRE(a.trace.norms.size() == b.trace.norms.size());
  for (size_t k = 0; k < a.trace.norms.size(); ++k) {
    CHECK(a.trace.norms[k] == b.trace.norms[k]);
    CHECK(a.trace.min_on_K[k] == b.trace.min_on_K[k]);
  }
}

TEST_CASE("evolve validates its inputs") {
  auto forms = heat_forms(0.0);
  auto u0 = normalized_bump(forms);

  CHECK_THROWS_WITH_AS(mhlab::evolve(forms, u0, -1.0, 1e-3),
                       doctest::Contains("horizon must be positive"),
                       mhlab::Error);
  CHECK_THROWS_WITH_AS(
      mhlab::evolve(forms, u0, 0.01, 0.02),
      doctest::Contains("time step must be positive and at most the horizon"),
      mhlab::Error);

  Eigen::VectorXd short_u = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_WITH_AS(
      mhlab::evolve(forms, short_u, 0.01, 1e-3),
      doctest::Contains("initial data size does not match the mesh"),
      mhlab::Error);

  Eigen::VectorXd negative = u0;
  negative[0] = -1.0;
  CHECK_THROWS_WITH_AS(mhlab::evolve(forms, negative, 0.01, 1e-3),
                       doctest::Contains("initial data must be nonnegative"),
                       mhlab::Error);

  EvolveOptions opts;
  opts.control.lo = {2.05, 2.05, 2.05};
  opts.control.hi = {2.15, 2.15, 2.15};
  // The coarse mesh has no nodes inside that sliver: the base grid puts
  // planes on the integers and the graded planes cluster inside |x -+ 1| < 1.
  CHECK_THROWS_WITH_AS(
      mhlab::evolve(forms, u0, 0.01, 1e-3, opts),
      doctest::Contains("no samples: control box contains no mesh nodes"),
      mhlab::Error);
}

TEST_CASE("fit_exponential_bound recovers a clean exponential") {
  auto trace =
      synthetic_trace([](double t) { return std::exp(-3.0 * t); }, 21, 1.0);
  auto fit = mhlab::fit_exponential_bound(trace);
  CHECK(fit.bounded);
  CHECK(fit.omega == doctest::Approx(-3.0).epsilon(1e-10));
  CHECK(fit.prefactor == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.samples_used == 21);
}

TEST_CASE("fit_exponential_bound uses the positive prefix only") {
  auto trace = synthetic_trace(
      [](double t) { return t < 0.7 ? std::exp(-2.0 * t) : 0.0; }, 21, 1.0);
  auto fit = mhlab::fit_exponential_bound(trace);
  // 21 samples over [0,1]: t = 0, 0.05, ..., 0.65 stay positive (14 of them).
  CHECK(fit.samples_used == 14);
  CHECK(fit.omega == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("fit_exponential_bound rejects short traces and flags wiggles") {
  auto tiny = synthetic_trace([](double t) { return std::exp(-t); }, 5, 1.0);
  CHECK_THROWS_WITH_AS(mhlab::fit_exponential_bound(tiny),
                       doctest::Contains("trace too short"), mhlab::Error);

  auto wiggly = synthetic_trace(
      [](double t) { return std::exp(std::sin(8.0 * t)); }, 40, 2.0);
  auto fit = mhlab::fit_exponential_bound(wiggly);
  CHECK_FALSE(fit.bounded);
  CHECK(fit.residual > 0.1);
}

TEST_CASE("blowup_indicator rejects an empty level schedule") {
  auto poles = two_poles();
  CHECK_THROWS_WITH_AS(
      mhlab::blowup_indicator(lebesgue(poles), poles, 0.1, {}),
      doctest::Contains("no samples: empty mesh level list"), mhlab::Error);
}
