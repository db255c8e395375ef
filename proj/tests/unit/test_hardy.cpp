#include <doctest.h>

#include <mhlab/errors.hpp>
#include <mhlab/geometry.hpp>
#include <mhlab/hardy.hpp>
#include <mhlab/partition.hpp>
#include <mhlab/quadrature.hpp>
#include <mhlab/rng.hpp>
#include <mhlab/weights.hpp>

#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

using mhlab::beta_cross_max;
using mhlab::build_configuration;
using mhlab::hardy_constant;
using mhlab::HardyMethod;
using mhlab::vector_field_constants;

namespace {

mhlab::PoleConfiguration two_poles(int dim) {
  std::vector<double> a(dim, 0.0), b(dim, 0.0);
  a[0] = -1.0;
  b[0] = 1.0;
  return build_configuration({a, b}, dim, 1.0);
}

}  // namespace

TEST_CASE("hardy_constant: exact rational values") {
  CHECK(hardy_constant(3, 0.0) == 0.25);
  CHECK(hardy_constant(4, 0.0) == 1.0);
  CHECK(hardy_constant(5, 0.0) == 2.25);
  CHECK(hardy_constant(4, -1.0) == 0.25);
  CHECK(hardy_constant(3, 1.0) == 1.0);
}

TEST_CASE("beta_cross_max maximizes the concave coefficient polynomial") {
  for (int n : {1, 2, 3, 4}) {
    for (int N : {3, 4, 5}) {
      for (double k2 : {-0.5, 0.0, 1.0}) {
        double beta = beta_cross_max(n, N, k2);
        auto payoff = [&](double b) {
          return (N + k2 - 2.0) * b - n * b * b;
        };
        double argmax = oracles::golden_max(payoff, 0.0, 4.0);
        // Golden section locates a flat quadratic max only to ~sqrt(eps);
        // the payoff VALUE is the quantity that must match tightly.
        CHECK(beta == doctest::Approx(argmax).epsilon(1e-6));
        CHECK(payoff(beta) == doctest::Approx(payoff(argmax)).epsilon(1e-10));
        // Maximum value is c_o/n.
        CHECK(payoff(beta) ==
              doctest::Approx(hardy_constant(N, k2) / n).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("cross-term identity holds pointwise to rounding") {
  mhlab::Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = 3 + trial % 3;
    int n = 2 + trial % 3;
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(dim);
      for (int d = 0; d < dim; ++d) p[d] = rng.uniform(-3.0, 3.0);
      pts.push_back(p);
    }
    mhlab::PoleConfiguration config;
    try {
      config = build_configuration(pts, dim);
    } catch (const mhlab::Error&) {
      continue;  // rejected coincident random draw
    }
    std::vector<double> x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform(-4.0, 4.0);
    // A 0.5 standoff keeps the 1/(t_i t_j) terms below ~1e2, so the 1e-12
    // gate measures the algebra rather than rounding of large magnitudes.
    if (mhlab::nearest_pole(config, x).dist < 0.5) continue;
    CHECK(mhlab::cross_term_residual(config, x) <= 1e-12);
  }
}

TEST_CASE("cross_potential: hand value for unit-separated poles") {
  auto poles = two_poles(3);
  // x = (0,1,0): t_1^2 = t_2^2 = 2, |a_1-a_2|^2 = 4, ordered pairs double it:
  // 2 * 4/(2*2) = 2.
  std::vector<double> x{0.0, 1.0, 0.0};
  CHECK(mhlab::cross_potential(poles, x) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(mhlab::multipolar_potential(poles, x) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("vector_field_constants reproduce the worked example") {
  // n=2, N=4, k2=0 (c_o=1), eps=1, c=0.5: 1+eps/2 = 1.5, c(1+eps/2)=0.75,
  // beta_pm = (1 +- 0.5)/1.5, K = beta_minus^2 * (n-1)(n-1+1/(2eps)) + k1.
  auto vf = vector_field_constants(2, 0.5, 1.0, 1.0, 0.0, 4, 0.0);
  CHECK(vf.beta_minus == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(vf.beta_plus == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(vf.K == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(vf.c_max == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(vf.epsilon == 1.0);
}

TEST_CASE("beta branches coincide exactly at c = c_o/(1+eps/2)") {
  for (double eps : {0.5, 1.0, 2.0}) {
    double c_o = hardy_constant(4, 0.0);
    double c_star = c_o / (1.0 + eps / 2.0);
    auto vf = vector_field_constants(2, c_star, 1.0, eps, 0.0, 4, 0.0);
    CHECK(vf.beta_minus ==
          doctest::Approx(vf.beta_plus).epsilon(1e-12));
  }
}

TEST_CASE("vector_field_constants rejects c beyond the epsilon ceiling") {
  CHECK_THROWS_WITH_AS(
      vector_field_constants(2, 0.9, 1.0, 1.0, 0.0, 4, 0.0),
      doctest::Contains("c out of admissible range for this epsilon"),
      mhlab::Error);
}

TEST_CASE("single pole drops the vector-field remainder to k1") {
  auto vf = vector_field_constants(1, 0.2, 0.7, 1.0, 0.35, 4, 0.0);
  CHECK(vf.K == doctest::Approx(0.35).epsilon(1e-15));
}

TEST_CASE("ims_remainder: worked values, monotonicity, and rejections") {
  CHECK(mhlab::ims_remainder(2, 0.25, 1.0, 0.0, 0.0) ==
        doctest::Approx(0.75).epsilon(1e-15));
  const double pi_sq_half = std::numbers::pi * std::numbers::pi / 2.0;
  CHECK(mhlab::ims_remainder(3, 1.0, 2.0, pi_sq_half, 1.0) ==
        doctest::Approx((pi_sq_half + 4.0) / 4.0 + 1.0).epsilon(1e-15));

  // Monotone in n, c, k0, k1; decreasing in r0.
  double base = mhlab::ims_remainder(2, 0.25, 1.0, 1.0, 0.5);
  CHECK(mhlab::ims_remainder(3, 0.25, 1.0, 1.0, 0.5) > base);
  CHECK(mhlab::ims_remainder(2, 0.5, 1.0, 1.0, 0.5) > base);
  CHECK(mhlab::ims_remainder(2, 0.25, 1.0, 2.0, 0.5) > base);
  CHECK(mhlab::ims_remainder(2, 0.25, 1.0, 1.0, 1.0) > base);
  CHECK(mhlab::ims_remainder(2, 0.25, 2.0, 1.0, 0.5) < base);

  CHECK_THROWS_WITH_AS(mhlab::ims_remainder(1, 0.25, 1.0, 0.0, 0.0),
                       doctest::Contains("needs two poles"), mhlab::Error);
  CHECK_THROWS_WITH_AS(
      mhlab::ims_remainder(2, 0.25, 1.0, 9.9, 0.0),
      doctest::Contains("k0 outside [0, pi^2)"), mhlab::Error);
  CHECK_THROWS_AS(mhlab::ims_remainder(2, 0.25, 1.0, -0.1, 0.0),
                  mhlab::Error);
  CHECK_THROWS_WITH_AS(mhlab::ims_remainder(2, 0.25, 0.0, 0.0, 0.0),
                       doctest::Contains("invalid radius"), mhlab::Error);
}

TEST_CASE("method names round-trip and unknown names are rejected") {
  for (auto m : {HardyMethod::vector_field_cross, HardyMethod::vector_field,
                 HardyMethod::ims}) {
    CHECK(mhlab::parse_method(mhlab::method_name(m)) == m);
  }
  CHECK_THROWS_WITH_AS(mhlab::parse_method("bogus"),
                       doctest::Contains("unknown method: bogus"),
                       mhlab::Error);
}

TEST_CASE("check_inequality holds on a smooth bump at the critical constant") {
  auto poles = two_poles(3);
  mhlab::WeightSpec spec;
  spec.poles = poles;
  auto rule = mhlab::build_rule(poles, 2.0);

  mhlab::TestFunction phi;
  phi.value = [](std::span<const double> x) {
    double s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::exp(-s);
  };
  phi.gradient = [](std::span<const double> x, std::span<double> g) {
    double s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    double v = std::exp(-s);
    for (int d = 0; d < 3; ++d) g[d] = -2.0 * x[d] * v;
  };

  double c_o = hardy_constant(3, 0.0);
  for (auto method : {HardyMethod::ims, HardyMethod::vector_field,
                      HardyMethod::vector_field_cross}) {
    double c = method == HardyMethod::vector_field ? 0.8 * c_o : c_o;
    auto report =
        mhlab::check_inequality(phi, spec, poles, c, method, rule);
    CAPTURE(report.method);
    CHECK(report.verdict == "holds");
    CHECK(report.margin >= -report.quadrature_error);
    CHECK(report.rhs >= report.lhs - report.quadrature_error);
    CHECK(report.c_o == doctest::Approx(c_o));
  }
}

TEST_CASE("supercritical c needs the explicit opt-in") {
  auto poles = two_poles(3);
  mhlab::WeightSpec spec;
  spec.poles = poles;
  auto rule = mhlab::build_rule(poles, 2.0);
  mhlab::TestFunction phi;
  phi.value = [](std::span<const double>) { return 1.0; };
  phi.gradient = [](std::span<const double>, std::span<double> g) {
    for (auto& v : g) v = 0.0;
  };
  double c_super = 2.0 * hardy_constant(3, 0.0);
  CHECK_THROWS_WITH_AS(
      mhlab::check_inequality(phi, spec, poles, c_super, HardyMethod::ims,
                              rule),
      doctest::Contains("constant out of range"), mhlab::Error);
  mhlab::CheckOptions opts;
  opts.allow_supercritical = true;
  opts.k0 = 5.0;
  CHECK_NOTHROW(mhlab::check_inequality(phi, spec, poles, c_super,
                                        HardyMethod::ims, rule, opts));
}

TEST_CASE("regression_family: size, unique names, gradient consistency") {
  auto poles = two_poles(3);
  auto family = mhlab::regression_family(poles, 2.0, 42);
  CHECK(family.size() >= 8);

  std::set<std::string> names;
  for (const auto& member : family) names.insert(member.name);
  CHECK(names.size() == family.size());

  // Spot-check each member's analytic gradient against central differences
  // at a few generic points.
  mhlab::Rng rng(7);
  for (const auto& member : family) {
    CAPTURE(member.name);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x(3);
      for (int d = 0; d < 3; ++d) x[d] = rng.uniform(-1.6, 1.6);
      if (mhlab::nearest_pole(poles, x).dist < 0.05) continue;
      std::vector<double> g(3);
      member.fn.gradient(x, g);
      auto fd = oracles::fd_gradient(member.fn.value, x, 1e-6);
      for (int d = 0; d < 3; ++d) {
        CHECK(g[d] == doctest::Approx(fd[d]).epsilon(1e-5).scale(1.0));
      }
    }
  }
}
