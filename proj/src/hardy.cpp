#include "mhlab/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mhlab/errors.hpp"
#include "mhlab/rng.hpp"

namespace mhlab {
namespace {

double pairwise_sum(const double* v, size_t n) {
  if (n <= 64) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

void guard_not_pole(const PoleConfiguration& config,
                    std::span<const double> x) {
  for (int i = 0; i < config.count(); ++i)
    if (pole_distance_sq(config, x, i) == 0.0)
      throw config_error("singular point");
}

}  // namespace

double multipolar_potential(const PoleConfiguration& config,
                            std::span<const double> x) {
  guard_not_pole(config, x);
  double v = 0.0;
  for (int i = 0; i < config.count(); ++i)
    v += 1.0 / pole_distance_sq(config, x, i);
  return v;
}

double cross_potential(const PoleConfiguration& config,
                       std::span<const double> x) {
  guard_not_pole(config, x);
  int n = config.count();
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double ti2 = pole_distance_sq(config, x, i);
    for (int j = i + 1; j < n; ++j) {
      double tj2 = pole_distance_sq(config, x, j);
      double dij2 = distance_sq(config.poles[i], config.poles[j]);
      sum += 2.0 * dij2 / (ti2 * tj2);
    }
  }
  return sum;
}

double cross_term_residual(const PoleConfiguration& config,
                           std::span<const double> x) {
  int n = config.count();
  if (n < 2) throw config_error("needs two poles");
  guard_not_pole(config, x);
  int N = config.dimension;
  double left = 0.0;
  for (int i = 0; i < n; ++i) {
    double ti2 = pole_distance_sq(config, x, i);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double tj2 = pole_distance_sq(config, x, j);
      double dotp = 0.0;
      for (int d = 0; d < N; ++d)
        dotp += (x[d] - config.poles[i][d]) * (x[d] - config.poles[j][d]);
      left += dotp / (ti2 * tj2);
    }
  }
  double right =
      (n - 1) * multipolar_potential(config, x) - 0.5 * cross_potential(config, x);
  return std::abs(left - right);
}

double hardy_constant(int N, double k2) {
  if (N < 3) throw config_error("dimension below 3");
  if (!(k2 > 2.0 - N)) throw config_error("violates k2 > 2-N");
  double half = (N + k2 - 2.0) / 2.0;
  return half * half;
}

double beta_cross_max(int n, int N, double k2) {
  if (n < 1) throw config_error("pole list is empty");
  if (!(k2 > 2.0 - N)) throw config_error("violates k2 > 2-N");
  return (N + k2 - 2.0) / (2.0 * n);
}

VectorFieldConstants vector_field_constants(int n, double c, double r0,
                                            double epsilon, double k1, int N,
                                            double k2) {
  if (n < 1) throw config_error("pole list is empty");
  if (!(r0 > 0.0)) throw config_error("invalid radius");
  if (!(epsilon > 0.0)) throw config_error("constant out of range");
  double c_o = hardy_constant(N, k2);
  VectorFieldConstants out;
  out.epsilon = epsilon;
  out.c_max = c_o / (1.0 + epsilon / 2.0);
  if (!(c > 0.0) || c > out.c_max * (1.0 + 1e-14))
    throw config_error("c out of admissible range for this epsilon");
  double factor = 1.0 + epsilon / 2.0;
  double disc = std::sqrt(std::max(0.0, c_o - c * factor));
  out.beta_plus = (std::sqrt(c_o) + disc) / factor;
  out.beta_minus = (std::sqrt(c_o) - disc) / factor;
  out.K = out.beta_minus * out.beta_minus / (r0 * r0) * (n - 1) *
              ((n - 1) + 1.0 / (2.0 * epsilon)) +
          k1;
  return out;
}

double ims_remainder(int n, double c, double r0, double k0, double k1) {
  if (n < 2) throw config_error("needs two poles");
  if (!(c > 0.0)) throw config_error("constant out of range");
  if (!(r0 > 0.0)) throw config_error("invalid radius");
  constexpr double pi_sq = 9.869604401089358;
  if (!(k0 >= 0.0) || k0 >= pi_sq)
    throw config_error("k0 outside [0, pi^2)");
  return (k0 + (n + 1) * c) / (r0 * r0) + k1;
}

std::string method_name(HardyMethod method) {
  switch (method) {
    case HardyMethod::vector_field_cross:
      return "vector-field-cross";
    case HardyMethod::vector_field:
      return "vector-field";
    case HardyMethod::ims:
      return "ims";
  }
  return "unknown";
}

HardyMethod parse_method(const std::string& name) {
  if (name == "vector-field-cross") return HardyMethod::vector_field_cross;
  if (name == "vector-field") return HardyMethod::vector_field;
  if (name == "ims") return HardyMethod::ims;
  throw config_error("unknown method: " + name);
}

namespace {

// One sweep computing the four integrals (plus the cross term on demand)
// on the fine and coarse node sets; errors are per-component gaps.
struct FormIntegrals {
  double grad = 0.0, pot = 0.0, mass = 0.0, cross = 0.0;
  double err_grad = 0.0, err_pot = 0.0, err_mass = 0.0, err_cross = 0.0;
};

FormIntegrals sweep_form(const TestFunction& phi, const WeightSpec& spec,
                         const PoleConfiguration& config,
                         const QuadratureRule& rule, bool with_cross) {
  int N = config.dimension;
  std::vector<double> g(N);
  auto accumulate = [&](bool coarse, double& o_grad, double& o_pot,
                        double& o_mass, double& o_cross) {
    long count = coarse ? rule.coarse_count() : rule.count();
    std::vector<double> tg(count), tp(count), tm(count), tx(count);
    for (long k = 0; k < count; ++k) {
      auto x = coarse ? rule.coarse_node(k) : rule.node(k);
      double w = (coarse ? rule.coarse_weight(k) : rule.weight(k)) *
                 eval_weight(spec, x);
      double p = phi.value(x);
      phi.gradient(x, g);
      double g2 = 0.0;
      for (int d = 0; d < N; ++d) g2 += g[d] * g[d];
      double pot = multipolar_potential(config, x);
      tg[k] = w * g2;
      tp[k] = w * pot * p * p;
      tm[k] = w * p * p;
      tx[k] = with_cross ? w * cross_potential(config, x) * p * p : 0.0;
      if (!std::isfinite(tg[k]) || !std::isfinite(tp[k]) ||
          !std::isfinite(tm[k]) || !std::isfinite(tx[k]))
        throw numeric_error("singular evaluation at node");
    }
    o_grad = pairwise_sum(tg.data(), tg.size());
    o_pot = pairwise_sum(tp.data(), tp.size());
    o_mass = pairwise_sum(tm.data(), tm.size());
    o_cross = pairwise_sum(tx.data(), tx.size());
  };
  FormIntegrals out;
  double cg, cp, cm, cx;
  accumulate(false, out.grad, out.pot, out.mass, out.cross);
  accumulate(true, cg, cp, cm, cx);
  out.err_grad = std::abs(out.grad - cg);
  out.err_pot = std::abs(out.pot - cp);
  out.err_mass = std::abs(out.mass - cm);
  out.err_cross = std::abs(out.cross - cx);
  return out;
}

}  // namespace

QuadraticForm quadratic_form(const TestFunction& phi, const WeightSpec& spec,
                             const PoleConfiguration& config, double c,
                             const QuadratureRule& rule) {
  FormIntegrals f = sweep_form(phi, spec, config, rule, false);
  QuadraticForm out;
  out.grad_energy = f.grad;
  out.potential_energy = c * f.pot;
  out.mass = f.mass;
  out.Q = out.grad_energy - out.potential_energy;
  out.quadrature_error = f.err_grad + std::abs(c) * f.err_pot + f.err_mass;
  return out;
}

HardyReport check_inequality(const TestFunction& phi, const WeightSpec& spec,
                             const PoleConfiguration& config, double c,
                             HardyMethod method, const QuadratureRule& rule,
                             const CheckOptions& opts) {
  int n = config.count();
  int N = config.dimension;
  double c_o = hardy_constant(N, spec.k2);

  HardyReport rep;
  rep.method = method_name(method);
  rep.c_o = c_o;
  rep.c = c;

  bool with_cross = method == HardyMethod::vector_field_cross;
  FormIntegrals f = sweep_form(phi, spec, config, rule, with_cross);

  switch (method) {
    case HardyMethod::vector_field_cross: {
      double beta = beta_cross_max(n, N, spec.k2);
      double coeff = c_o / n;
      rep.c = coeff;
      rep.K = spec.k1;
      rep.lhs = coeff * f.pot + 0.5 * beta * beta * f.cross;
      rep.rhs = f.grad + spec.k1 * f.mass;
      rep.quadrature_error = coeff * f.err_pot +
                             0.5 * beta * beta * f.err_cross + f.err_grad +
                             std::abs(spec.k1) * f.err_mass;
      break;
    }
    case HardyMethod::vector_field: {
      if (!(c > 0.0) || !(c < c_o))
        throw config_error("constant out of range");
      double epsilon = c_o / c - 1.0;
      VectorFieldConstants vf =
          vector_field_constants(n, c, config.r0, epsilon, spec.k1, N,
                                 spec.k2);
      rep.K = vf.K;
      rep.lhs = c * f.pot;
      rep.rhs = f.grad + vf.K * f.mass;
      rep.quadrature_error =
          c * f.err_pot + f.err_grad + std::abs(vf.K) * f.err_mass;
      break;
    }
    case HardyMethod::ims: {
      if (!(c > 0.0) || (!opts.allow_supercritical && c > c_o * (1.0 + 1e-14)))
        throw config_error("constant out of range");
      double k0;
      if (opts.k0.has_value()) {
        k0 = *opts.k0;
      } else {
        PartitionOfUnity partition = build_partition(config);
        k0 = compute_k0(partition, c);
      }
      rep.k0 = k0;
      double K = ims_remainder(n, c, config.r0, k0, spec.k1);
      rep.K = K;
      rep.lhs = c * f.pot;
      rep.rhs = f.grad + K * f.mass;
      rep.quadrature_error =
          c * f.err_pot + f.err_grad + std::abs(K) * f.err_mass;
      break;
    }
  }
  rep.margin = rep.rhs - rep.lhs;
  if (rep.margin >= 0.0)
    rep.verdict = "holds";
  else if (rep.margin >= -rep.quadrature_error)
    rep.verdict = "violated_within_error";
  else
    rep.verdict = "violated";
  return rep;
}

namespace {

// Quintic smoothstep drop: theta(0) = 1, theta(1) = 0, C^2 at both ends.
double theta_drop(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double theta_drop_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return -s * s * (30.0 + s * (-60.0 + 30.0 * s));
}

TestFunction radial_bump(std::vector<double> center, double width) {
  TestFunction f;
  f.value = [center, width](std::span<const double> x) {
    double t = 0.0;
    for (size_t d = 0; d < x.size(); ++d) {
      double diff = x[d] - center[d];
      t += diff * diff;
    }
    return theta_drop(std::sqrt(t) / width);
  };
  f.gradient = [center, width](std::span<const double> x,
                               std::span<double> out) {
    double t2 = 0.0;
    for (size_t d = 0; d < x.size(); ++d) {
      double diff = x[d] - center[d];
      t2 += diff * diff;
    }
    double t = std::sqrt(t2);
    if (t == 0.0 || t >= width) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    double dv = theta_drop_deriv(t / width) / width;
    for (size_t d = 0; d < x.size(); ++d)
      out[d] = dv * (x[d] - center[d]) / t;
  };
  return f;
}

TestFunction gaussian_bump(std::vector<double> center, double q, double cut) {
  // exp(-q |x-c|^2) times a per-axis quintic cut at |x_d - c_d| = cut.
  TestFunction f;
  f.value = [center, q, cut](std::span<const double> x) {
    double t2 = 0.0, b = 1.0;
    for (size_t d = 0; d < x.size(); ++d) {
      double diff = x[d] - center[d];
      t2 += diff * diff;
      b *= theta_drop(std::abs(diff) / cut);
    }
    return std::exp(-q * t2) * b;
  };
  f.gradient = [center, q, cut](std::span<const double> x,
                                std::span<double> out) {
    size_t N = x.size();
    double t2 = 0.0;
    std::vector<double> cuts(N), dcuts(N);
    double b = 1.0;
    for (size_t d = 0; d < N; ++d) {
      double diff = x[d] - center[d];
      t2 += diff * diff;
      double s = std::abs(diff) / cut;
      cuts[d] = theta_drop(s);
      double sign = diff >= 0.0 ? 1.0 : -1.0;
      dcuts[d] = theta_drop_deriv(s) * sign / cut;
      b *= cuts[d];
    }
    double e = std::exp(-q * t2);
    for (size_t d = 0; d < N; ++d) {
      double others = 1.0;
      for (size_t e2 = 0; e2 < N; ++e2)
        if (e2 != d) others *= cuts[e2];
      out[d] = e * (-2.0 * q * (x[d] - center[d]) * b + dcuts[d] * others);
    }
  };
  return f;
}

TestFunction combine(TestFunction a, TestFunction b, double wa, double wb) {
  TestFunction f;
  f.value = [a, b, wa, wb](std::span<const double> x) {
    return wa * a.value(x) + wb * b.value(x);
  };
  f.gradient = [a, b, wa, wb](std::span<const double> x,
                              std::span<double> out) {
    std::vector<double> tmp(x.size());
    a.gradient(x, out);
    b.gradient(x, tmp);
    for (size_t d = 0; d < x.size(); ++d) out[d] = wa * out[d] + wb * tmp[d];
  };
  return f;
}

}  // namespace

std::vector<FamilyMember> regression_family(const PoleConfiguration& config,
                                            double box_half_width,
                                            std::uint64_t seed) {
  std::vector<FamilyMember> family;
  int N = config.dimension;
  double widths[3] = {0.35 * config.r0, 0.6 * config.r0, 0.95 * config.r0};
  for (int i = 0; i < config.count(); ++i) {
    for (int wi = 0; wi < 3; ++wi) {
      family.push_back(
          {"pole" + std::to_string(i) + "-bump-w" + std::to_string(wi),
           radial_bump(config.poles[i], widths[wi])});
    }
  }
  std::vector<double> centroid(N, 0.0);
  for (const auto& a : config.poles)
    for (int d = 0; d < N; ++d) centroid[d] += a[d] / config.count();
  double spread = box_half_width / 3.0;
  family.push_back({"centroid-gaussian",
                    gaussian_bump(centroid, 1.0 / (2.0 * spread * spread),
                                  0.9 * box_half_width)});

  Rng rng(seed);
  for (int k = 0; k < 2; ++k) {
    double wa = 0.25 + rng.uniform01();
    double wb = 0.25 + rng.uniform01();
    int pole = static_cast<int>(rng.raw() % config.count());
    family.push_back(
        {"combo-" + std::to_string(k),
         combine(radial_bump(config.poles[pole], widths[k == 0 ? 1 : 2]),
                 family[3 * config.count()].fn, wa, wb)});
  }
  return family;
}

}  // namespace mhlab
