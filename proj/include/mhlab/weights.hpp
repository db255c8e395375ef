#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mhlab/geometry.hpp"

namespace mhlab {

// The built-in weight family
//   mu(x) = exp(-delta * sum_j |x-a_j|^m) / prod_j |x-a_j|^gamma
// with log-gradient
//   grad mu / mu = sum_j (-gamma - delta*m*|x-a_j|^m) (x-a_j)/|x-a_j|^2.
// k1, k2 are the candidate constants of the drift-bound hypotheses; for this
// family k2 = -gamma is the only value matching the critical local
// integrability exponent N - gamma at a pole.
struct WeightSpec {
  double gamma = 0.0;
  double delta = 0.0;
  double m = 2.0;
  double k1 = 0.0;
  double k2 = 0.0;
  PoleConfiguration poles;

  // Optional user-supplied weight outside the built-in family. When set,
  // both callbacks must be set and k2 must be meaningful for that weight;
  // audits run unchanged, but nothing about the family parameters applies.
  std::function<double(std::span<const double>)> custom_mu;
  std::function<void(std::span<const double>, std::span<double>)>
      custom_log_gradient;

  bool has_custom() const { return static_cast<bool>(custom_mu); }
};

// Throws config errors for parameters outside the admissible windows:
// delta >= 0, m <= 2, -N < gamma < N-2, k2 > 2-N.
void validate_weight_spec(const WeightSpec& spec);

// Weight value. At a pole: gamma > 0 signals "singular point"; gamma < 0
// returns 0; gamma = 0 returns the (finite) exponential factor.
double eval_weight(const WeightSpec& spec, std::span<const double> x);

// log mu, with the same pole behavior (-inf allowed for gamma < 0).
double eval_log_weight(const WeightSpec& spec, std::span<const double> x);

// grad mu / mu into `out` (size N). Signals "singular point" at a pole.
void eval_log_gradient(const WeightSpec& spec, std::span<const double> x,
                       std::span<double> out);

// A flat list of sample points with a human-readable region description.
struct SampleSet {
  int dimension = 0;
  std::vector<double> flat;
  std::string region;

  long count() const {
    return dimension == 0 ? 0 : static_cast<long>(flat.size()) / dimension;
  }
  std::span<const double> point(long i) const {
    return {flat.data() + i * dimension, static_cast<size_t>(dimension)};
  }
};

// Box [-L,L]^N minus pole balls of radius exclusion_radius, plus (when
// graded_tail is true) radial samples inside each ball graded down to
// 1e-6*r0, because the binding direction of the drift bound is x -> a_i.
SampleSet make_drift_samples(const PoleConfiguration& config, double L,
                             long count, std::uint64_t seed,
                             double exclusion_radius, bool graded_tail);

// Radially graded samples inside each ball B(a_i, r0), for the mollified
// audit.
SampleSet make_ball_samples(const PoleConfiguration& config, long per_ball,
                            std::uint64_t seed);

struct HypothesisReport {
  std::string hypothesis_id;  // drift-bound | mollified-drift-bound |
                              // critical-exponent | density
  long sample_count = 0;
  // Most-violated margin over the samples, positive = satisfied. For the
  // drift audits this is the slack divided by mu(x), so samples near poles
  // are on a comparable scale; for density it is the fitted decay exponent.
  double min_slack = 0.0;
  std::vector<double> witness_point;
  std::string verdict;  // satisfied | violated | inconclusive
  std::string region;
  double tolerance = 0.0;
  double extra = 0.0;  // op-specific: estimated exponent, fitted slope, ...
};

// Drift bound: slack(x)/mu = beta * sum_i (x-a_i)/|x-a_i|^2 . (grad mu/mu)
//                            + k1 - k2*beta*sum_i 1/|x-a_i|^2  >= 0.
// The audits accept family members outside the gamma and k2 admissibility
// windows (only delta >= 0 and m <= 2 are enforced): checking how a bound
// fails at a window edge is a primary use.
HypothesisReport check_H2(const WeightSpec& spec, double beta,
                          const SampleSet& samples);

// Mollified drift bound on each ball B(a_i, r0), for every eps in eps_list:
// (k1 + k2*alpha/(eps+t^2)) - alpha*(x-a_i)/(eps+t^2) . (grad mu/mu) >= 0.
HypothesisReport check_H2prime(const WeightSpec& spec, double alpha,
                               const std::vector<double>& eps_list,
                               const SampleSet& ball_samples);

// Smallest k1 making the respective audit pass on the given samples (the
// slack is affine in k1, so the minimizer is exact on the sample set).
double audit_k1_H2(const WeightSpec& spec, double beta,
                   const SampleSet& samples);
double audit_k1_H2prime(const WeightSpec& spec, double alpha,
                        const std::vector<double>& eps_list,
                        const SampleSet& ball_samples);

// sup{d : |x-a_i|^{-d} is mu-integrable near a_i}, estimated by bisection on
// d; each candidate integral is declared divergent when shrinking the inner
// cutoff through `radii` keeps growing the value by more than 5% per halving.
// For the built-in family the analytic answer is N - gamma. The resolution
// is set by the deepest radius: the 5% rule separates exponents only down to
// |d - (N-gamma)| ~ 0.85/ln(1/radii.back()), so radii should reach ~0.5^16
// for a +-0.1 answer. Requires gamma < N (local integrability), not the
// full admissibility window.
double estimate_critical_exponent(const WeightSpec& spec, int pole_index,
                                  const std::vector<double>& radii);

// q(delta) = delta^{-p} * mu(B(a_i, delta)) must decay to 0 with a positive
// power-law exponent. Requires gamma < N only, like the exponent estimate;
// the interesting verdict flips happen at the window edges.
HypothesisReport check_density_condition(const WeightSpec& spec, double p,
                                         int pole_index,
                                         const std::vector<double>& deltas);

// Near-pole / far-field constants of the sufficient drift-bound condition
// for the built-in family, evaluated from the displayed closed forms with
// alpha normalized to -1. Per-pole sums are aggregated over the pole index in
// the conservative direction (largest c_rho, most negative c1).
struct AdmissibilityConstants {
  double c_rho = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 1.0;
  // The two displayed bounds on gamma (nonnegative branch upper bound,
  // negative branch lower bound).
  double gamma_upper = 0.0;
  double gamma_lower = 0.0;
};
AdmissibilityConstants admissibility_constants(const WeightSpec& spec,
                                               double rho);

}  // namespace mhlab
