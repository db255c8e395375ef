#include "mhlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mhlab/errors.hpp"
#include "mhlab/quadrature.hpp"
#include "mhlab/rng.hpp"

namespace mhlab {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
  return s;
}

double standard_normal(Rng& rng) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void random_unit(Rng& rng, std::span<double> out) {
  while (true) {
    double norm2 = 0.0;
    for (auto& c : out) {
      c = standard_normal(rng);
      norm2 += c * c;
    }
    if (norm2 > 1e-12) {
      double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : out) c *= inv;
      return;
    }
  }
}

// Verdict margin below which a hypothesis audit is called violated. The
// audited quantities are O(1) after the mu normalization, so this absorbs
// rounding only.
constexpr double kSlackTolerance = 1e-9;

struct SlackScan {
  double min_slack = std::numeric_limits<double>::infinity();
  std::vector<double> witness;
  void offer(double slack, std::span<const double> x) {
    if (slack < min_slack) {
      min_slack = slack;
      witness.assign(x.begin(), x.end());
    }
  }
};

}  // namespace

namespace {

// Family-shape checks shared by the audits, which deliberately accept
// members outside the gamma and k2 windows: the pointwise drift audits are
// meaningful for any weight the log-gradient evaluates on, and the
// diagnostic value of verifying a violation AT a window edge is the point
// of running them there.
void validate_weight_shape(const WeightSpec& spec) {
  if (spec.has_custom()) {
    if (!spec.custom_log_gradient)
      throw config_error("custom weight requires both callbacks");
    return;
  }
  if (!(spec.delta >= 0.0)) throw config_error("delta must be nonnegative");
  if (!(spec.m <= 2.0)) throw config_error("m must be at most 2");
}

// The pole-local moment audits additionally need mu integrable at the pole.
void validate_weight_local(const WeightSpec& spec) {
  validate_weight_shape(spec);
  if (!spec.has_custom() && !(spec.gamma < spec.poles.dimension))
    throw config_error("gamma must be below N for a locally integrable weight");
}

}  // namespace

void validate_weight_spec(const WeightSpec& spec) {
  int N = spec.poles.dimension;
  validate_weight_shape(spec);
  if (!spec.has_custom() && !(spec.gamma > -N && spec.gamma < N - 2.0))
    throw config_error("gamma outside (-N, N-2)");
  if (!(spec.k2 > 2.0 - N)) throw config_error("violates k2 > 2-N");
}

double eval_log_weight(const WeightSpec& spec, std::span<const double> x) {
  if (spec.has_custom()) {
    double mu = spec.custom_mu(x);
    if (mu < 0.0) throw numeric_error("custom weight returned a negative value");
    return std::log(mu);
  }
  const auto& config = spec.poles;
  double lw = 0.0;
  for (int j = 0; j < config.count(); ++j) {
    double t2 = pole_distance_sq(config, x, j);
    if (t2 == 0.0) {
      if (spec.gamma > 0.0) throw config_error("singular point");
      // gamma <= 0: the polar factor contributes +inf decay (gamma < 0) or
      // nothing (gamma = 0); the exponential factor is finite for m > 0.
      if (spec.gamma < 0.0) return -std::numeric_limits<double>::infinity();
      if (spec.delta > 0.0 && spec.m < 0.0)
        return -std::numeric_limits<double>::infinity();
      continue;
    }
    if (spec.delta != 0.0) lw -= spec.delta * std::pow(t2, spec.m / 2.0);
    if (spec.gamma != 0.0) lw -= spec.gamma * 0.5 * std::log(t2);
  }
  return lw;
}

double eval_weight(const WeightSpec& spec, std::span<const double> x) {
  if (spec.has_custom()) return spec.custom_mu(x);
  return std::exp(eval_log_weight(spec, x));
}

void eval_log_gradient(const WeightSpec& spec, std::span<const double> x,
                       std::span<double> out) {
  const auto& config = spec.poles;
  for (int j = 0; j < config.count(); ++j)
    if (pole_distance_sq(config, x, j) == 0.0)
      throw config_error("singular point");
  if (spec.has_custom()) {
    spec.custom_log_gradient(x, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j < config.count(); ++j) {
    double t2 = pole_distance_sq(config, x, j);
    double coef = (-spec.gamma - spec.delta * spec.m *
                                     std::pow(t2, spec.m / 2.0)) /
                  t2;
    const auto& a = config.poles[j];
    for (int d = 0; d < config.dimension; ++d)
      out[d] += coef * (x[d] - a[d]);
  }
}

SampleSet make_drift_samples(const PoleConfiguration& config, double L,
                             long count, std::uint64_t seed,
                             double exclusion_radius, bool graded_tail) {
  if (count <= 0) throw config_error("no samples");
  SampleSet s;
  s.dimension = config.dimension;
  Rng rng(seed);
  std::vector<double> x(config.dimension);
  long accepted = 0, attempts = 0;
  while (accepted < count) {
    if (++attempts > 1000 * count) throw config_error("no samples");
    for (int d = 0; d < config.dimension; ++d) x[d] = rng.uniform(-L, L);
    if (exclusion_radius > 0.0 &&
        nearest_pole(config, x).dist < exclusion_radius)
      continue;
    s.flat.insert(s.flat.end(), x.begin(), x.end());
    ++accepted;
  }
  if (graded_tail) {
    double floor_r = 1e-6 * config.r0;
    for (const auto& a : config.poles) {
      for (double r = exclusion_radius / 2.0; r > floor_r; r /= 2.0) {
        for (int rep = 0; rep < 8; ++rep) {
          random_unit(rng, x);
          for (int d = 0; d < config.dimension; ++d)
            x[d] = a[d] + r * x[d];
          s.flat.insert(s.flat.end(), x.begin(), x.end());
        }
      }
    }
  }
  std::ostringstream region;
  region << "box [-" << L << "," << L << "]^" << config.dimension
         << " minus pole balls of radius " << exclusion_radius;
  if (graded_tail) region << ", with graded radial tails down to 1e-6*r0";
  s.region = region.str();
  return s;
}

SampleSet make_ball_samples(const PoleConfiguration& config, long per_ball,
                            std::uint64_t seed) {
  if (per_ball <= 0) throw config_error("no samples");
  SampleSet s;
  s.dimension = config.dimension;
  Rng rng(seed);
  std::vector<double> x(config.dimension);
  for (const auto& a : config.poles) {
    for (long k = 0; k < per_ball; ++k) {
      // Log-uniform radius over six decades keeps the near-pole regime as
      // well sampled as the ball bulk.
      double r = config.r0 * std::pow(10.0, -6.0 * rng.uniform01());
      random_unit(rng, x);
      for (int d = 0; d < config.dimension; ++d) x[d] = a[d] + r * x[d];
      s.flat.insert(s.flat.end(), x.begin(), x.end());
    }
  }
  std::ostringstream region;
  region << "pole balls B(a_i, " << config.r0 << "), log-graded radii";
  s.region = region.str();
  return s;
}

HypothesisReport check_H2(const WeightSpec& spec, double beta,
                          const SampleSet& samples) {
  if (samples.count() == 0) throw config_error("no samples");
  if (!(beta > 0.0)) throw config_error("beta must be positive");
  validate_weight_shape(spec);
  const auto& config = spec.poles;
  std::vector<double> g(config.dimension);
  SlackScan scan;
  for (long k = 0; k < samples.count(); ++k) {
    auto x = samples.point(k);
    eval_log_gradient(spec, x, g);
    double slack = spec.k1;
    for (int i = 0; i < config.count(); ++i) {
      double t2 = pole_distance_sq(config, x, i);
      double radial = 0.0;
      const auto& a = config.poles[i];
      for (int d = 0; d < config.dimension; ++d)
        radial += (x[d] - a[d]) * g[d];
      slack += beta * radial / t2 - spec.k2 * beta / t2;
    }
    scan.offer(slack, x);
  }
  HypothesisReport r;
  r.hypothesis_id = "drift-bound";
  r.sample_count = samples.count();
  r.min_slack = scan.min_slack;
  r.witness_point = std::move(scan.witness);
  r.region = samples.region;
  r.tolerance = kSlackTolerance;
  r.verdict = scan.min_slack >= -kSlackTolerance ? "satisfied" : "violated";
  return r;
}

HypothesisReport check_H2prime(const WeightSpec& spec, double alpha,
                               const std::vector<double>& eps_list,
                               const SampleSet& ball_samples) {
  if (ball_samples.count() == 0 || eps_list.empty())
    throw config_error("no samples");
  if (!(alpha < 0.0)) throw config_error("alpha must be negative");
  for (double eps : eps_list)
    if (!(eps > 0.0)) throw config_error("each eps must be positive");
  validate_weight_shape(spec);
  const auto& config = spec.poles;
  std::vector<double> g(config.dimension);
  SlackScan scan;
  for (long k = 0; k < ball_samples.count(); ++k) {
    auto x = ball_samples.point(k);
    eval_log_gradient(spec, x, g);
    int i = nearest_pole(config, x).index;
    double t2 = pole_distance_sq(config, x, i);
    double radial = 0.0;
    const auto& a = config.poles[i];
    for (int d = 0; d < config.dimension; ++d)
      radial += (x[d] - a[d]) * g[d];
    for (double eps : eps_list) {
      double slack =
          spec.k1 + spec.k2 * alpha / (eps + t2) - alpha * radial / (eps + t2);
      scan.offer(slack, x);
    }
  }
  HypothesisReport r;
  r.hypothesis_id = "mollified-drift-bound";
  r.sample_count = ball_samples.count();
  r.min_slack = scan.min_slack;
  r.witness_point = std::move(scan.witness);
  r.region = ball_samples.region;
  r.tolerance = kSlackTolerance;
  r.extra = static_cast<double>(eps_list.size());
  r.verdict = scan.min_slack >= -kSlackTolerance ? "satisfied" : "violated";
  return r;
}

double audit_k1_H2(const WeightSpec& spec, double beta,
                   const SampleSet& samples) {
  WeightSpec probe = spec;
  probe.k1 = 0.0;
  HypothesisReport r = check_H2(probe, beta, samples);
  // slack = k1 + (rest); the smallest admissible k1 cancels the worst rest.
  return -r.min_slack;
}

double audit_k1_H2prime(const WeightSpec& spec, double alpha,
                        const std::vector<double>& eps_list,
                        const SampleSet& ball_samples) {
  WeightSpec probe = spec;
  probe.k1 = 0.0;
  HypothesisReport r = check_H2prime(probe, alpha, eps_list, ball_samples);
  return -r.min_slack;
}

namespace {

// Ball integral of |x-a_i|^{-d} dmu with cutoff r_cut, radial-heavy rule
// (the integrand is radial; mu varies mildly in angle near the pole).
double pole_moment(const WeightSpec& spec, int pole_index, double R,
                   double r_cut, double d_exp) {
  const auto& a = spec.poles.poles[pole_index];
  int N = spec.poles.dimension;
  Integrand f = [&a, N, d_exp](std::span<const double> x) {
    double t2 = 0.0;
    for (int d = 0; d < N; ++d) {
      double diff = x[d] - a[d];
      t2 += diff * diff;
    }
    return std::pow(t2, -d_exp / 2.0);
  };
  BallRuleOptions opts;
  opts.radial_order = 10;
  opts.angular_order = 4;
  opts.outer_panels = 4;
  return integrate_ball(spec.poles, spec, pole_index, R, r_cut, f, opts);
}

// Divergence test: growth per cutoff halving above 5% on the last radii pair.
bool moment_diverges(const WeightSpec& spec, int pole_index, double R,
                     const std::vector<double>& radii, double d_exp) {
  double prev = 0.0;
  double growth = 0.0;
  for (size_t k = 0; k < radii.size(); ++k) {
    double v = pole_moment(spec, pole_index, R, radii[k], d_exp);
    if (k > 0) {
      double halvings = std::log2(radii[k - 1] / radii[k]);
      growth = (v / prev - 1.0) / halvings;
    }
    prev = v;
  }
  return growth > 0.05;
}

}  // namespace

double estimate_critical_exponent(const WeightSpec& spec, int pole_index,
                                  const std::vector<double>& radii) {
  validate_weight_local(spec);
  const auto& config = spec.poles;
  if (pole_index < 0 || pole_index >= config.count())
    throw config_error("pole index out of range");
  if (radii.size() < 2) throw config_error("no samples");
  for (size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] < radii[k - 1])))
      throw config_error("invalid radius");
  }
  double R = config.r0;
  if (!(radii.front() < R)) throw config_error("invalid radius");

  double lo = 0.0, hi = 2.0 * config.dimension + 4.0;
  if (moment_diverges(spec, pole_index, R, radii, lo) ||
      !moment_diverges(spec, pole_index, R, radii, hi))
    throw inconclusive_error(
        "inconclusive: critical exponent bisection failed to bracket");
  for (int iter = 0; iter < 16; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (moment_diverges(spec, pole_index, R, radii, mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

HypothesisReport check_density_condition(const WeightSpec& spec, double p,
                                         int pole_index,
                                         const std::vector<double>& deltas) {
  validate_weight_local(spec);
  const auto& config = spec.poles;
  int N = config.dimension;
  if (pole_index < 0 || pole_index >= config.count())
    throw config_error("pole index out of range");
  if (!(p >= 1.0 && p < N)) throw config_error("constant out of range");
  if (deltas.size() < 3) throw config_error("no samples");
  for (size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0) || (k > 0 && !(deltas[k] < deltas[k - 1])))
      throw config_error("invalid radius");
  }

  std::vector<double> logq(deltas.size()), logd(deltas.size());
  for (size_t k = 0; k < deltas.size(); ++k) {
    double mass = pole_moment(spec, pole_index, deltas[k], deltas[k] * 1e-5,
                              0.0);
    logq[k] = -p * std::log(deltas[k]) + std::log(mass);
    logd[k] = std::log(deltas[k]);
  }

  // LSQ fit log q = e * log delta + b; e is the decay exponent of q.
  double n = static_cast<double>(deltas.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t k = 0; k < deltas.size(); ++k) {
    sx += logd[k];
    sy += logq[k];
    sxx += logd[k] * logd[k];
    sxy += logd[k] * logq[k];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double intercept = (sy - slope * sx) / n;
  double residual = 0.0;
  for (size_t k = 0; k < deltas.size(); ++k)
    residual =
        std::max(residual, std::abs(slope * logd[k] + intercept - logq[k]));
  if (residual > 0.25)
    throw inconclusive_error("inconclusive: non-monotone noisy tail");

  HypothesisReport r;
  r.hypothesis_id = "density";
  r.sample_count = static_cast<long>(deltas.size());
  r.min_slack = slope;
  r.witness_point = config.poles[pole_index];
  std::ostringstream region;
  region << "balls B(a_" << pole_index << ", delta), delta in ["
         << deltas.back() << ", " << deltas.front() << "]";
  r.region = region.str();
  r.tolerance = 0.05;
  r.extra = residual;
  r.verdict = slope > 0.05 ? "satisfied" : "violated";
  return r;
}

AdmissibilityConstants admissibility_constants(const WeightSpec& spec,
                                               double rho) {
  validate_weight_spec(spec);
  const auto& config = spec.poles;
  if (!(rho > 0.0) || rho > config.r0) throw config_error("invalid radius");
  int n = config.count();
  double r0 = config.r0;
  double m = spec.m;
  constexpr double alpha = -1.0;

  AdmissibilityConstants out;
  bool negative_branch = spec.gamma < 0.0;

  // Per-pole sums aggregated conservatively: largest c_rho, most negative
  // c1 (both branches), so the reported gamma window is the tightest one.
  double c1_neg_branch = 0.0;
  for (int k = 0; k < n; ++k) {
    double c_rho_k = 0.0, c1_pos_k = 0.0, c1_neg_k = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      double dist = distance(config.poles[k], config.poles[j]);
      double shifted = rho + dist;
      c_rho_k += std::pow(shifted, m) * (1.0 - dist * dist / (shifted * shifted));
      double edge = r0 + dist;
      c1_pos_k += -0.5 * dist * dist / (edge * edge);
      c1_neg_k += -0.5 * dist * dist / (r0 * r0);
    }
    if (k == 0) {
      out.c_rho = c_rho_k;
      out.c1 = negative_branch ? c1_neg_k : c1_pos_k;
      c1_neg_branch = c1_neg_k;
    } else {
      out.c_rho = std::max(out.c_rho, c_rho_k);
      out.c1 = std::min(out.c1, negative_branch ? c1_neg_k : c1_pos_k);
      c1_neg_branch = std::min(c1_neg_branch, c1_neg_k);
    }
  }

  out.c2 = negative_branch ? out.c1 : 0.0;
  out.c3 = alpha * spec.delta * m * (n - 1) / (2.0 * std::pow(r0, 2.0 - m));
  if (!negative_branch)
    out.c3 += alpha * spec.gamma * (n - 1) / (2.0 * r0 * r0);
  out.c4 = 1.0 + out.c_rho / (2.0 * std::pow(rho, m));

  // Displayed gamma window: 0 <= gamma <= -k2/(1+(n-1)/2) on the nonnegative
  // branch; -(k2 + delta*m*c_rho/2)/(1+(n-1)/2+c1) <= gamma < 0 on the
  // negative branch (c1 taken from its gamma<0 case).
  out.gamma_upper = -spec.k2 / (1.0 + (n - 1) / 2.0);
  out.gamma_lower = -(spec.k2 + spec.delta * m * out.c_rho / 2.0) /
                    (1.0 + (n - 1) / 2.0 + c1_neg_branch);
  return out;
}

}  // namespace mhlab
