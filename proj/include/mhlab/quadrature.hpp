#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mhlab/geometry.hpp"
#include "mhlab/weights.hpp"

namespace mhlab {

// Integration of f(x) dmu over a truncation box around the poles.
//
// Region split: each pole owns the cube [a_i - r0/2, a_i + r0/2]^N, inside
// which a C^7 tensor-product blend C_i ramps from 1 (inner half-cube) to 0
// (cube boundary). The far field integrates f*mu*(1 - sum_i C_i) on panel
// cells whose boundaries include every blend breakpoint plane, so the blend
// factor is a single polynomial per cell per axis and the tensor Gauss rule
// captures it exactly; polynomial integrands with mu = 1 are integrated to
// machine precision. The near field integrates f*mu*C_i on dyadic cube
// shells graded toward the pole down to r_min = r_min_ratio*r0, which gives
// geometric convergence for |x-a_i|^{-s} singularities with s < N - gamma.
struct QuadratureOptions {
  int panels_per_axis = 8;
  // Cap on graded shells per pole; the effective count is otherwise set by
  // r_min_ratio (one shell per halving).
  int shells_per_pole = 40;
  double r_min_ratio = 1e-6;
  // Gauss points per axis: far cells away from any blend, blend-ring cells
  // (needs >= 9: the blend polynomial has degree 15), graded near shells.
  int far_order = 5;
  int ring_order = 9;
  int near_order = 7;
};

using Integrand = std::function<double(std::span<const double>)>;

// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct Gauss1d {
  std::vector<double> x, w;
};
const Gauss1d& gauss_legendre(int n);

struct IntegrateResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

class QuadratureRule {
 public:
  QuadratureRule() = default;

  const PoleConfiguration& config() const { return config_; }
  double box_half_width() const { return box_half_width_; }
  const QuadratureOptions& options() const { return opts_; }
  double build_error_estimate() const { return build_error_; }
  double r_min() const { return r_min_; }

  long count() const { return static_cast<long>(weights_.size()); }
  long coarse_count() const { return static_cast<long>(weights_h_.size()); }
  std::span<const double> node(long i) const {
    return {coords_.data() + i * config_.dimension,
            static_cast<size_t>(config_.dimension)};
  }
  double weight(long i) const { return weights_[i]; }
  std::span<const double> coarse_node(long i) const {
    return {coords_h_.data() + i * config_.dimension,
            static_cast<size_t>(config_.dimension)};
  }
  double coarse_weight(long i) const { return weights_h_[i]; }

  friend QuadratureRule build_rule(const PoleConfiguration&, double,
                                   const QuadratureOptions&);
  friend class RuleBuilder;

 private:
  PoleConfiguration config_;
  double box_half_width_ = 0.0;
  QuadratureOptions opts_;
  double build_error_ = 0.0;
  double r_min_ = 0.0;
  std::vector<double> coords_, weights_;      // fine rule; blend folded in
  std::vector<double> coords_h_, weights_h_;  // embedded coarser rule
  // One extra dyadic shell per pole below r_min, for divergence checks.
  std::vector<double> coords_tail_, weights_tail_;

 public:
  long tail_count() const { return static_cast<long>(weights_tail_.size()); }
  std::span<const double> tail_node(long i) const {
    return {coords_tail_.data() + i * config_.dimension,
            static_cast<size_t>(config_.dimension)};
  }
  double tail_weight(long i) const { return weights_tail_[i]; }
};

// Throws "truncation box too small" unless every ball B(a_i, r0) lies inside
// [-L, L]^N. The stored error estimate compares the rule against its embedded
// coarser companion on a probe integrand with a mild pole singularity.
QuadratureRule build_rule(const PoleConfiguration& config,
                          double box_half_width,
                          const QuadratureOptions& opts = {});

// sum_k w_k f(x_k) mu(x_k), with the error estimate from the embedded rule.
// A non-finite integrand or weight value at a node signals
// "singular evaluation" naming the node.
IntegrateResult integrate(const QuadratureRule& rule, const Integrand& f,
                          const WeightSpec& spec);

struct CheckedIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  bool divergent = false;
  // Relative growth from extending the rule one dyadic shell below r_min;
  // above 5% the integral is declared divergent.
  double tail_growth = 0.0;
};
CheckedIntegral integrate_checked(const QuadratureRule& rule,
                                  const Integrand& f, const WeightSpec& spec);

// Integral of f dmu over the ball B(a_i, R), by dyadic radial shells from R
// down to r_cut times a product rule on the sphere. Intended for integrands
// whose only singularity is at the center; other poles must lie outside the
// ball.
struct BallRuleOptions {
  int radial_order = 10;
  int angular_order = 8;
  int outer_panels = 4;  // radial panels on the outermost shell
};
double integrate_ball(const PoleConfiguration& config, const WeightSpec& spec,
                      int pole_index, double R, double r_cut,
                      const Integrand& f, const BallRuleOptions& opts = {});

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
};
// Uniform sampling over the box, weighted by mu; deterministic for a fixed
// seed. An independent cross-check for integrate(), not a precision tool.
MonteCarloResult monte_carlo_oracle(const Integrand& f, const WeightSpec& spec,
                                    double box_half_width, long sample_count,
                                    std::uint64_t seed);

// Values of one scalar field at every node of a rule, so several integrals
// of the same field can be formed without re-evaluating it.
struct FieldSample {
  const QuadratureRule* rule = nullptr;
  std::vector<double> values;         // fine nodes
  std::vector<double> coarse_values;  // embedded nodes
};
FieldSample sample_field(const QuadratureRule& rule, const Integrand& f);
IntegrateResult integrate(const FieldSample& sample, const WeightSpec& spec);

// Shared helper: dyadic cube-graded quadrature of `emit`-visited nodes over
// box minus a small cube around `corner_or_center`; used by the finite
// element assembly for pole cells. Visits (point, weight) pairs.
void dyadic_box_quadrature(
    std::span<const double> lo, std::span<const double> hi,
    std::span<const double> pole, int levels, int order,
    const std::function<void(std::span<const double>, double)>& visit);

}  // namespace mhlab
