#include "mhlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mhlab/errors.hpp"

namespace mhlab {

ProfileValue eval_profile(double t) {
  if (t <= 0.5) return {1.0, 0.0};
  if (t >= 1.0) return {0.0, 0.0};
  return {std::sin(std::numbers::pi * t),
          std::numbers::pi * std::cos(std::numbers::pi * t)};
}

PartitionOfUnity::PartitionOfUnity(PoleConfiguration config)
    : config_(std::move(config)) {}

PartitionOfUnity build_partition(const PoleConfiguration& config) {
  return PartitionOfUnity(config);
}

void PartitionOfUnity::eval(std::span<const double> x,
                            std::span<double> values) const {
  int n = config_.count();
  double outer_sq = 1.0;
  for (int i = 0; i < n; ++i) {
    double t = std::sqrt(pole_distance_sq(config_, x, i)) / config_.r0;
    values[i] = eval_profile(t).value;
    outer_sq -= values[i] * values[i];
  }
  values[n] = std::sqrt(std::max(0.0, outer_sq));
}

void PartitionOfUnity::eval(std::span<const double> x,
                            std::span<double> values,
                            std::span<double> gradients) const {
  int n = config_.count();
  int N = config_.dimension;
  std::fill(gradients.begin(), gradients.end(), 0.0);
  std::fill(values.begin(), values.end(), 0.0);

  // Disjoint supports: at most one pole member is strictly between 0 and 1.
  int active = -1;
  double active_t = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = std::sqrt(pole_distance_sq(config_, x, i)) / config_.r0;
    if (t < 1.0) {
      values[i] = eval_profile(t).value;
      if (t > 0.5) {
        active = i;
        active_t = t;
      }
    }
  }

  if (active < 0) {
    // Either deep inside a ball (some J_i = 1, outer member vanishes with
    // gradient defined as 0) or outside all supports (outer member is 1).
    bool inside = false;
    for (int i = 0; i < n; ++i)
      if (values[i] == 1.0) inside = true;
    values[n] = inside ? 0.0 : 1.0;
    return;
  }

  // Transition annulus of pole `active`: J_a = sin(pi t), outer = -cos(pi t)
  // (cos is negative for t in (1/2, 1)), both through the same angle, so
  // property a) cancels exactly.
  double angle = std::numbers::pi * active_t;
  double s = std::sin(angle), c = std::cos(angle);
  values[active] = s;
  values[n] = -c;
  const auto& a = config_.poles[active];
  double r = active_t * config_.r0;
  double scale = std::numbers::pi / config_.r0;
  for (int d = 0; d < N; ++d) {
    double u = (x[d] - a[d]) / r;
    gradients[active * N + d] = scale * c * u;
    gradients[n * N + d] = scale * s * u;
  }
}

PartitionCheck verify_partition(const PartitionOfUnity& partition,
                                const SampleSet& samples) {
  if (samples.count() == 0) throw config_error("no samples");
  const auto& config = partition.config();
  int n = config.count();
  int N = config.dimension;
  std::vector<double> J(n + 1), G((n + 1) * N);
  PartitionCheck out;
  for (long k = 0; k < samples.count(); ++k) {
    auto x = samples.point(k);
    partition.eval(x, J, G);
    ++out.evaluated;

    double sum_sq = 0.0;
    for (int i = 0; i <= n; ++i) sum_sq += J[i] * J[i];
    out.max_sum_residual =
        std::max(out.max_sum_residual, std::abs(sum_sq - 1.0));

    for (int d = 0; d < N; ++d) {
      double dot = 0.0;
      for (int i = 0; i <= n; ++i) dot += J[i] * G[i * N + d];
      out.max_orthogonality = std::max(out.max_orthogonality, std::abs(dot));
    }

    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        out.max_support_overlap =
            std::max(out.max_support_overlap, std::abs(J[i] * J[j]));

    bool kink = false;
    for (int i = 0; i < n; ++i)
      if (J[i] != 1.0 && 1.0 - J[i] * J[i] < 1e-4) kink = true;
    if (kink) {
      ++out.skipped_near_kink;
      continue;
    }
    double lhs = 0.0;
    for (int i = 0; i <= n; ++i)
      for (int d = 0; d < N; ++d) lhs += G[i * N + d] * G[i * N + d];
    double rhs = 0.0;
    bool defined = true;
    for (int i = 0; i < n; ++i) {
      double g2 = 0.0;
      for (int d = 0; d < N; ++d) g2 += G[i * N + d] * G[i * N + d];
      double denom = 1.0 - J[i] * J[i];
      if (denom <= 0.0) {
        if (g2 != 0.0) defined = false;
        continue;
      }
      rhs += g2 / denom;
    }
    if (defined)
      out.max_identity_d = std::max(out.max_identity_d, std::abs(lhs - rhs));
  }
  return out;
}

namespace {

double halton(std::uint64_t index, int base) {
  double f = 1.0, value = 0.0;
  std::uint64_t i = index + 1;  // skip the zero point
  while (i > 0) {
    f /= base;
    value += f * static_cast<double>(i % base);
    i /= base;
  }
  return value;
}

// Reduced objective on the transition annulus of one ball, with the nearest
// neighbour at distance D (D <= 0 means single pole):
//   G(t, u) = pi^2 + c cos^2(pi t / r0) r0^2 (1/t^2 + 1/s^2),
//   s^2 = t^2 + D^2 - 2 t D u.
// Everywhere else on the support the bracket is 0 (inner half-ball) and the
// sup cannot be attained there for c > 0.
double annulus_objective(double t, double u, double D, double r0, double c) {
  double angle = std::numbers::pi * t / r0;
  double cc = std::cos(angle);
  double pair = 1.0 / (t * t);
  if (D > 0.0) {
    double s2 = t * t + D * D - 2.0 * t * D * u;
    pair += 1.0 / s2;
  }
  return std::numbers::pi * std::numbers::pi + c * cc * cc * r0 * r0 * pair;
}

}  // namespace

double compute_k0(const PartitionOfUnity& partition, double c) {
  if (!(c > 0.0)) throw config_error("constant out of range");
  const auto& config = partition.config();
  int n = config.count();
  double r0 = config.r0;

  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double D = -1.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = distance(config.poles[i], config.poles[j]);
      if (D < 0.0 || d < D) D = d;
    }
    // Low-discrepancy scan of (t, u), then shrinking-box refinement around
    // the incumbent. The objective is smooth on the compact annulus.
    double t_lo = r0 / 2.0, t_hi = r0, u_lo = -1.0, u_hi = 1.0;
    double bt = 0.75 * r0, bu = 0.0;
    double bval = -std::numeric_limits<double>::infinity();
    std::uint64_t offset = 0;
    for (int round = 0; round < 4; ++round) {
      for (std::uint64_t k = 0; k < 4096; ++k) {
        double t = t_lo + (t_hi - t_lo) * halton(offset + k, 2);
        double u = u_lo + (u_hi - u_lo) * halton(offset + k, 3);
        double v = annulus_objective(t, u, D, r0, c);
        if (v > bval) {
          bval = v;
          bt = t;
          bu = u;
        }
      }
      offset += 4096;
      double t_half = 0.08 * (t_hi - t_lo), u_half = 0.08 * (u_hi - u_lo);
      t_lo = std::max(r0 / 2.0, bt - t_half);
      t_hi = std::min(r0, bt + t_half);
      u_lo = std::max(-1.0, bu - u_half);
      u_hi = std::min(1.0, bu + u_half);
    }
    if (!std::isfinite(bval))
      throw inconclusive_error("inconclusive: k0 maximization did not settle");
    best = std::max(best, bval);
  }
  return std::max(0.0, best - 2.0 * c);
}

double ims_decomposition_residual(const PartitionOfUnity& partition,
                                  const TestFunction& phi, const Integrand& V,
                                  const WeightSpec& spec,
                                  const QuadratureRule& rule) {
  const auto& config = partition.config();
  int n = config.count();
  int N = config.dimension;
  std::vector<double> J(n + 1), G((n + 1) * N), gphi(N);
  long count = rule.count();
  std::vector<double> terms_a(count), terms_b(count), terms_c(count);
  for (long k = 0; k < count; ++k) {
    auto x = rule.node(k);
    double w = rule.weight(k) * eval_weight(spec, x);
    double p = phi.value(x);
    phi.gradient(x, gphi);
    partition.eval(x, J, G);
    double v = V(x);

    double grad2 = 0.0;
    for (int d = 0; d < N; ++d) grad2 += gphi[d] * gphi[d];
    terms_a[k] = w * (grad2 - v * p * p);

    double b = 0.0, csum = 0.0;
    for (int i = 0; i <= n; ++i) {
      double cross = 0.0, jg2 = 0.0;
      for (int d = 0; d < N; ++d) {
        double comp = J[i] * gphi[d] + p * G[i * N + d];
        cross += comp * comp;
        jg2 += G[i * N + d] * G[i * N + d];
      }
      b += cross - v * J[i] * J[i] * p * p;
      csum += jg2 * p * p;
    }
    terms_b[k] = w * b;
    terms_c[k] = w * csum;
  }
  auto pair_sum = [](std::vector<double>& v) {
    // Deterministic pairwise reduction.
    std::function<double(const double*, size_t)> rec =
        [&rec](const double* p, size_t m) -> double {
      if (m <= 64) {
        double s = 0.0;
        for (size_t i = 0; i < m; ++i) s += p[i];
        return s;
      }
      size_t h = m / 2;
      return rec(p, h) + rec(p + h, m - h);
    };
    return rec(v.data(), v.size());
  };
  double A = pair_sum(terms_a), B = pair_sum(terms_b), C = pair_sum(terms_c);
  return std::abs(A - B + C);
}

}  // namespace mhlab
