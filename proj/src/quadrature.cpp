#include "mhlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mhlab/errors.hpp"
#include "mhlab/rng.hpp"

namespace mhlab {

// Computed once per order by Newton iteration on the Legendre recurrence.
const Gauss1d& gauss_legendre(int n) {
  static std::map<int, Gauss1d> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Gauss1d g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-based initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(g)).first->second;
}

namespace {

// Deterministic pairwise summation (fixed reduction order).
double pairwise_sum(const double* v, size_t n) {
  if (n <= 64) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// ---------------------------------------------------------------------------
// C^7 blend. smooth7 ramps 0 -> 1 over [0, 1] with seven vanishing
// derivatives at both ends (degree-15 polynomial).
double smooth7(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double u2 = u * u, u4 = u2 * u2, u8 = u4 * u4;
  double p =
      6435.0 +
      u * (-40040.0 +
           u * (108108.0 +
                u * (-163800.0 +
                     u * (150150.0 +
                          u * (-83160.0 + u * (25740.0 - u * 3432.0))))));
  return u8 * p;
}

// 1-d blend piece: 1 on |u| <= 1/2, 0 at |u| >= 1.
double blend1(double u) {
  double a = std::abs(u);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  return smooth7(2.0 * (1.0 - a));
}

// Tensor-product blend for pole i: product over axes of blend1 scaled to the
// pole cube of half-width w = r0/2.
double pole_blend(const PoleConfiguration& config, double w,
                  std::span<const double> x, int pole) {
  double c = 1.0;
  const auto& a = config.poles[pole];
  for (int d = 0; d < config.dimension; ++d) {
    c *= blend1((x[d] - a[d]) / w);
    if (c == 0.0) return 0.0;
  }
  return c;
}

struct NodeSink {
  std::vector<double>* coords;
  std::vector<double>* weights;
  void add(std::span<const double> x, double w) {
    if (!(w > 0.0)) return;
    coords->insert(coords->end(), x.begin(), x.end());
    weights->push_back(w);
  }
};

// Tensor Gauss rule over the box [lo, hi], weight multiplied by
// `factor(x)` (pass nullptr for 1).
void tensor_gauss(std::span<const double> lo, std::span<const double> hi,
                  int order,
                  const std::function<double(std::span<const double>)>* factor,
                  NodeSink& sink) {
  int N = static_cast<int>(lo.size());
  const Gauss1d& g = gauss_legendre(order);
  std::vector<int> idx(N, 0);
  std::vector<double> x(N);
  double cellw = 1.0;
  for (int d = 0; d < N; ++d) cellw *= (hi[d] - lo[d]) / 2.0;
  if (cellw <= 0.0) return;
  while (true) {
    double w = cellw;
    for (int d = 0; d < N; ++d) {
      x[d] = 0.5 * (lo[d] + hi[d]) + 0.5 * (hi[d] - lo[d]) * g.x[idx[d]];
      w *= g.w[idx[d]];
    }
    double f = factor ? (*factor)(x) : 1.0;
    if (f > 0.0) sink.add(x, w * f);
    int d = 0;
    while (d < N && ++idx[d] == order) idx[d++] = 0;
    if (d == N) break;
  }
}

// ---------------------------------------------------------------------------
// Sphere product rule: unit vectors and surface weights for S^{N-1}.
// N = 2: uniform on the circle (exact for trigonometric polynomials).
// N >= 3: Gauss nodes in the polar angle against sin^{N-2}, recursing on the
// equatorial sphere; for N = 3 the polar rule is Gauss in cos(theta), which
// integrates spherical polynomials exactly.
struct SphereRule {
  std::vector<double> dirs;  // flat, stride N
  std::vector<double> w;
  int N;
};

SphereRule sphere_rule(int N, int order) {
  SphereRule r;
  r.N = N;
  if (N == 2) {
    int M = std::max(8, 4 * order);
    for (int k = 0; k < M; ++k) {
      double phi = 2.0 * std::numbers::pi * (k + 0.5) / M;
      r.dirs.push_back(std::cos(phi));
      r.dirs.push_back(std::sin(phi));
      r.w.push_back(2.0 * std::numbers::pi / M);
    }
    return r;
  }
  SphereRule sub = sphere_rule(N - 1, order);
  const Gauss1d& g = gauss_legendre(order + (N - 3));
  int ng = static_cast<int>(g.x.size());
  for (int iq = 0; iq < ng; ++iq) {
    double cost, sint, wq;
    if (N == 3) {
      cost = g.x[iq];  // integrate in u = cos(theta) exactly
      sint = std::sqrt(std::max(0.0, 1.0 - cost * cost));
      wq = g.w[iq];
    } else {
      double theta = 0.5 * std::numbers::pi * (1.0 + g.x[iq]);
      cost = std::cos(theta);
      sint = std::sin(theta);
      wq = g.w[iq] * 0.5 * std::numbers::pi *
           std::pow(sint, static_cast<double>(N - 2));
    }
    for (size_t js = 0; js < sub.w.size(); ++js) {
      r.dirs.push_back(cost);
      for (int d = 0; d < N - 1; ++d)
        r.dirs.push_back(sint * sub.dirs[js * (N - 1) + d]);
      r.w.push_back(wq * sub.w[js]);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Near-field shell decomposition around one pole: the cube annulus
// [a +- h] minus [a +- h/2] splits into 2N aligned slabs (peel by the first
// axis exceeding h/2).
void emit_cube_annulus(std::span<const double> a, double h, int order,
                       const std::function<double(std::span<const double>)>*
                           factor,
                       NodeSink& sink) {
  int N = static_cast<int>(a.size());
  std::vector<double> lo(N), hi(N);
  for (int d = 0; d < N; ++d) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      for (int e = 0; e < N; ++e) {
        if (e < d) {
          lo[e] = a[e] - h / 2.0;
          hi[e] = a[e] + h / 2.0;
        } else if (e > d) {
          lo[e] = a[e] - h;
          hi[e] = a[e] + h;
        } else if (sgn == 0) {
          lo[e] = a[e] + h / 2.0;
          hi[e] = a[e] + h;
        } else {
          lo[e] = a[e] - h;
          hi[e] = a[e] - h / 2.0;
        }
      }
      tensor_gauss(lo, hi, order, factor, sink);
    }
  }
}

// Ring region cube(w) minus cube(w/2) as 3^N - 1 blend-aligned boxes.
void emit_blend_ring(const PoleConfiguration& config, int pole, double w,
                     int order, NodeSink& sink) {
  int N = config.dimension;
  const auto& a = config.poles[pole];
  auto factor = std::function<double(std::span<const double>)>(
      [&config, w, pole](std::span<const double> x) {
        return pole_blend(config, w, x, pole);
      });
  std::vector<int> piece(N, 0);  // 0: [-w,-w/2], 1: [-w/2,w/2], 2: [w/2,w]
  std::vector<double> lo(N), hi(N);
  while (true) {
    bool all_mid = true;
    for (int d = 0; d < N; ++d)
      if (piece[d] != 1) all_mid = false;
    if (!all_mid) {
      for (int d = 0; d < N; ++d) {
        double l = piece[d] == 0 ? -w : (piece[d] == 1 ? -w / 2.0 : w / 2.0);
        double h = piece[d] == 0 ? -w / 2.0 : (piece[d] == 1 ? w / 2.0 : w);
        lo[d] = a[d] + l;
        hi[d] = a[d] + h;
      }
      tensor_gauss(lo, hi, order, &factor, sink);
    }
    int d = 0;
    while (d < N && ++piece[d] == 3) piece[d++] = 0;
    if (d == N) break;
  }
}

struct BuildParams {
  int far_order;
  int ring_order;
  int near_order;
  int shells;  // graded levels below the ring
};

}  // namespace

class RuleBuilder {
 public:
  static void build(QuadratureRule& rule, const BuildParams& p,
                    std::vector<double>* coords, std::vector<double>* weights,
                    std::vector<double>* tail_coords,
                    std::vector<double>* tail_weights) {
    const PoleConfiguration& config = rule.config_;
    int N = config.dimension;
    double L = rule.box_half_width_;
    double w = config.r0 / 2.0;
    NodeSink sink{coords, weights};

    // Axis plane lists: uniform panels plus every blend breakpoint.
    std::vector<std::vector<double>> planes(N);
    for (int d = 0; d < N; ++d) {
      auto& pl = planes[d];
      int P = rule.opts_.panels_per_axis;
      for (int k = 0; k <= P; ++k) pl.push_back(-L + 2.0 * L * k / P);
      for (const auto& a : config.poles) {
        for (double off : {-w, -w / 2.0, w / 2.0, w}) pl.push_back(a[d] + off);
      }
      std::sort(pl.begin(), pl.end());
      pl.erase(std::unique(pl.begin(), pl.end(),
                           [L](double x, double y) {
                             return std::abs(x - y) < 1e-12 * std::max(1.0, L);
                           }),
               pl.end());
    }

    // Far field: every panel cell, classified per pole cube. Cells inside an
    // inner half-cube are skipped (the blend complement vanishes there);
    // cells inside a pole cube get the ring order so the blend polynomial is
    // integrated exactly; everything else gets the plain far order.
    auto far_factor = std::function<double(std::span<const double>)>(
        [&config, w](std::span<const double> x) {
          double f = 1.0;
          for (int i = 0; i < config.count(); ++i)
            f -= pole_blend(config, w, x, i);
          return std::max(0.0, f);
        });
    std::vector<int> idx(N, 0);
    std::vector<double> lo(N), hi(N), mid(N);
    while (true) {
      bool done = false;
      for (int d = 0; d < N; ++d) {
        if (idx[d] + 1 >= static_cast<int>(planes[d].size())) {
          done = true;
          break;
        }
        lo[d] = planes[d][idx[d]];
        hi[d] = planes[d][idx[d] + 1];
        mid[d] = 0.5 * (lo[d] + hi[d]);
      }
      if (!done) {
        bool skip = false;
        bool ring = false;
        for (int i = 0; i < config.count() && !skip; ++i) {
          const auto& a = config.poles[i];
          bool in_cube = true, in_inner = true;
          for (int d = 0; d < N; ++d) {
            double off = std::abs(mid[d] - a[d]);
            if (off > w) in_cube = false;
            if (off > w / 2.0) in_inner = false;
          }
          if (in_inner) skip = true;
          else if (in_cube) ring = true;
        }
        if (!skip)
          tensor_gauss(lo, hi, ring ? p.ring_order : p.far_order, &far_factor,
                       sink);
      }
      int d = 0;
      while (d < N) {
        ++idx[d];
        if (idx[d] + 1 < static_cast<int>(planes[d].size())) break;
        idx[d++] = 0;
      }
      if (d == N) break;
    }

    // Near field per pole: blend ring, then graded cube shells. The blend is
    // identically 1 below w/2, so the shells carry no factor.
    for (int i = 0; i < config.count(); ++i) {
      emit_blend_ring(config, i, w, p.ring_order, sink);
      std::span<const double> a(config.poles[i]);
      double h = w / 2.0;
      for (int j = 1; j <= p.shells; ++j) {
        emit_cube_annulus(a, h, p.near_order, nullptr, sink);
        h /= 2.0;
      }
      if (tail_coords) {
        NodeSink tail{tail_coords, tail_weights};
        emit_cube_annulus(a, h, p.near_order, nullptr, tail);
      }
    }
  }
};


QuadratureRule build_rule(const PoleConfiguration& config,
                          double box_half_width, const QuadratureOptions& opts) {
  for (const auto& a : config.poles) {
    for (double coord : a) {
      if (std::abs(coord) + config.r0 > box_half_width + 1e-12)
        throw config_error("truncation box too small");
    }
  }
  QuadratureRule rule;
  rule.config_ = config;
  rule.box_half_width_ = box_half_width;
  rule.opts_ = opts;

  double w = config.r0 / 2.0;
  double r_min = config.r0 * opts.r_min_ratio;
  int shells = static_cast<int>(std::ceil(std::log2(w / r_min)));
  shells = std::clamp(shells, 1, opts.shells_per_pole);
  rule.r_min_ = w * std::pow(0.5, shells);

  BuildParams fine{opts.far_order, opts.ring_order, opts.near_order, shells};
  RuleBuilder::build(rule, fine, &rule.coords_, &rule.weights_,
                     &rule.coords_tail_, &rule.weights_tail_);
  BuildParams coarse{std::max(3, opts.far_order - 1), opts.ring_order,
                     std::max(3, opts.near_order - 2),
                     std::max(1, shells - 2)};
  RuleBuilder::build(rule, coarse, &rule.coords_h_, &rule.weights_h_, nullptr,
                     nullptr);

  // Probe: unit weight, mild pole singularity. The fine/coarse gap estimates
  // the rule's resolution of near-pole integrands.
  WeightSpec unit;
  unit.poles = config;
  Integrand probe = [&config](std::span<const double> x) {
    double v = 1.0;
    for (int i = 0; i < config.count(); ++i) {
      double t = std::sqrt(pole_distance_sq(config, x, i));
      v += std::pow(config.r0 / t, 1.5);
    }
    return v;
  };
  rule.build_error_ = std::abs(integrate(rule, probe, unit).value -
                               [&] {
                                 double s = 0.0;
                                 std::vector<double> terms;
                                 terms.reserve(rule.coarse_count());
                                 for (long i = 0; i < rule.coarse_count(); ++i)
                                   terms.push_back(rule.coarse_weight(i) *
                                                   probe(rule.coarse_node(i)));
                                 s = pairwise_sum(terms.data(), terms.size());
                                 return s;
                               }());
  return rule;
}

namespace {

std::string node_string(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (size_t d = 0; d < x.size(); ++d) {
    if (d) os << ", ";
    os << x[d];
  }
  os << ")";
  return os.str();
}

double weighted_sum(const QuadratureRule& rule, const Integrand& f,
                    const WeightSpec& spec, bool coarse) {
  long n = coarse ? rule.coarse_count() : rule.count();
  std::vector<double> terms(n);
  for (long i = 0; i < n; ++i) {
    auto x = coarse ? rule.coarse_node(i) : rule.node(i);
    double w = coarse ? rule.coarse_weight(i) : rule.weight(i);
    double term = w * f(x) * eval_weight(spec, x);
    if (!std::isfinite(term))
      throw numeric_error("singular evaluation at node " + node_string(x));
    terms[i] = term;
  }
  return pairwise_sum(terms.data(), terms.size());
}

}  // namespace

IntegrateResult integrate(const QuadratureRule& rule, const Integrand& f,
                          const WeightSpec& spec) {
  IntegrateResult r;
  r.value = weighted_sum(rule, f, spec, false);
  double coarse = weighted_sum(rule, f, spec, true);
  r.error_estimate = std::abs(r.value - coarse);
  return r;
}

CheckedIntegral integrate_checked(const QuadratureRule& rule,
                                  const Integrand& f, const WeightSpec& spec) {
  IntegrateResult base = integrate(rule, f, spec);
  CheckedIntegral out;
  out.value = base.value;
  out.error_estimate = base.error_estimate;
  long n = rule.tail_count();
  std::vector<double> terms(n);
  for (long i = 0; i < n; ++i) {
    auto x = rule.tail_node(i);
    double term = rule.tail_weight(i) * f(x) * eval_weight(spec, x);
    if (!std::isfinite(term))
      throw numeric_error("singular evaluation at node " + node_string(x));
    terms[i] = term;
  }
  double tail = pairwise_sum(terms.data(), terms.size());
  out.tail_growth =
      std::abs(tail) / std::max(std::abs(base.value), 1e-300);
  out.divergent = out.tail_growth > 0.05;
  return out;
}

double integrate_ball(const PoleConfiguration& config, const WeightSpec& spec,
                      int pole_index, double R, double r_cut,
                      const Integrand& f, const BallRuleOptions& opts) {
  if (!(R > 0.0) || !(r_cut > 0.0) || r_cut >= R)
    throw config_error("invalid radius");
  // The rule is radial around a_i and cannot resolve a weight singularity
  // away from the center. R == dist is fine: radial nodes are panel-interior,
  // so the contact point itself is never evaluated.
  for (int j = 0; j < config.count(); ++j) {
    if (j == pole_index) continue;
    if (R > distance(config.poles[pole_index], config.poles[j]))
      throw config_error("ball reaches another pole");
  }
  int N = config.dimension;
  std::span<const double> a(config.poles[pole_index]);
  SphereRule sph = sphere_rule(N, opts.angular_order);
  const Gauss1d& g = gauss_legendre(opts.radial_order);

  std::vector<double> terms;
  std::vector<double> x(N);
  auto add_radial_panel = [&](double ra, double rb) {
    for (int iq = 0; iq < opts.radial_order; ++iq) {
      double r = 0.5 * (ra + rb) + 0.5 * (rb - ra) * g.x[iq];
      double wr = g.w[iq] * 0.5 * (rb - ra) * std::pow(r, N - 1);
      for (size_t js = 0; js < sph.w.size(); ++js) {
        for (int d = 0; d < N; ++d) x[d] = a[d] + r * sph.dirs[js * N + d];
        double term = wr * sph.w[js] * f(x) * eval_weight(spec, x);
        if (!std::isfinite(term))
          throw numeric_error("singular evaluation at node " + node_string(x));
        terms.push_back(term);
      }
    }
  };

  // Outermost shell [R/2, R] in several panels (integrands may vary fastest
  // there when a cutoff profile lives at the ball edge), then dyadic shells.
  double hi = R, lo = R / 2.0;
  for (int k = 0; k < opts.outer_panels; ++k) {
    double pa = lo + (hi - lo) * k / opts.outer_panels;
    double pb = lo + (hi - lo) * (k + 1) / opts.outer_panels;
    add_radial_panel(pa, pb);
  }
  while (lo > r_cut) {
    hi = lo;
    lo = std::max(lo / 2.0, r_cut);
    add_radial_panel(lo, hi);
  }
  return pairwise_sum(terms.data(), terms.size());
}

MonteCarloResult monte_carlo_oracle(const Integrand& f, const WeightSpec& spec,
                                    double box_half_width, long sample_count,
                                    std::uint64_t seed) {
  if (sample_count < 1000) throw config_error("sample_count below 1000");
  int N = spec.poles.dimension;
  Rng rng(seed);
  std::vector<double> x(N);
  double sum = 0.0, sumsq = 0.0;
  for (long k = 0; k < sample_count; ++k) {
    for (int d = 0; d < N; ++d)
      x[d] = rng.uniform(-box_half_width, box_half_width);
    double v = f(x) * eval_weight(spec, x);
    sum += v;
    sumsq += v * v;
  }
  double vol = std::pow(2.0 * box_half_width, N);
  double mean = sum / sample_count;
  double var = std::max(0.0, sumsq / sample_count - mean * mean);
  MonteCarloResult r;
  r.estimate = vol * mean;
  r.std_error = vol * std::sqrt(var / sample_count);
  return r;
}

FieldSample sample_field(const QuadratureRule& rule, const Integrand& f) {
  FieldSample s;
  s.rule = &rule;
  s.values.resize(rule.count());
  s.coarse_values.resize(rule.coarse_count());
  for (long i = 0; i < rule.count(); ++i) s.values[i] = f(rule.node(i));
  for (long i = 0; i < rule.coarse_count(); ++i)
    s.coarse_values[i] = f(rule.coarse_node(i));
  return s;
}

IntegrateResult integrate(const FieldSample& sample, const WeightSpec& spec) {
  const QuadratureRule& rule = *sample.rule;
  std::vector<double> terms(rule.count());
  for (long i = 0; i < rule.count(); ++i) {
    terms[i] = rule.weight(i) * sample.values[i] *
               eval_weight(spec, rule.node(i));
    if (!std::isfinite(terms[i]))
      throw numeric_error("singular evaluation at node " +
                          node_string(rule.node(i)));
  }
  IntegrateResult r;
  r.value = pairwise_sum(terms.data(), terms.size());
  std::vector<double> cterms(rule.coarse_count());
  for (long i = 0; i < rule.coarse_count(); ++i)
    cterms[i] = rule.coarse_weight(i) * sample.coarse_values[i] *
                eval_weight(spec, rule.coarse_node(i));
  r.error_estimate =
      std::abs(r.value - pairwise_sum(cterms.data(), cterms.size()));
  return r;
}

void dyadic_box_quadrature(
    std::span<const double> lo, std::span<const double> hi,
    std::span<const double> pole, int levels, int order,
    const std::function<void(std::span<const double>, double)>& visit) {
  int N = static_cast<int>(lo.size());
  const Gauss1d& g = gauss_legendre(order);

  // Emit a plain tensor Gauss rule on [bl, bh].
  auto emit = [&](std::span<const double> bl, std::span<const double> bh) {
    std::vector<int> idx(N, 0);
    std::vector<double> x(N);
    double cw = 1.0;
    for (int d = 0; d < N; ++d) cw *= (bh[d] - bl[d]) / 2.0;
    if (cw <= 0.0) return;
    while (true) {
      double wq = cw;
      for (int d = 0; d < N; ++d) {
        x[d] = 0.5 * (bl[d] + bh[d]) + 0.5 * (bh[d] - bl[d]) * g.x[idx[d]];
        wq *= g.w[idx[d]];
      }
      visit(x, wq);
      int d = 0;
      while (d < N && ++idx[d] == order) idx[d++] = 0;
      if (d == N) break;
    }
  };

  // Split [bl, bh] at the pole projection; grade each child toward its
  // pole-nearest corner by repeated bisection, emitting the peeled annuli.
  std::vector<double> q(N);
  for (int d = 0; d < N; ++d) q[d] = std::clamp(pole[d], lo[d], hi[d]);

  std::vector<int> part(N, 0);
  std::vector<double> bl(N), bh(N), corner(N), ml(N), mh(N), cl(N), ch(N);
  while (true) {
    bool degenerate = false;
    for (int d = 0; d < N; ++d) {
      if (part[d] == 0) {
        bl[d] = lo[d];
        bh[d] = q[d];
        corner[d] = q[d];
      } else {
        bl[d] = q[d];
        bh[d] = hi[d];
        corner[d] = q[d];
      }
      if (!(bh[d] - bl[d] > 0.0)) degenerate = true;
    }
    if (!degenerate) {
      // Peel toward `corner`: at each level emit child-box minus the halved
      // box hugging the corner, then recurse into the halved box.
      for (int d = 0; d < N; ++d) {
        cl[d] = bl[d];
        ch[d] = bh[d];
      }
      for (int lev = 0; lev < levels; ++lev) {
        for (int d = 0; d < N; ++d) {
          double h = (ch[d] - cl[d]) / 2.0;
          if (corner[d] == cl[d]) {
            ml[d] = cl[d];
            mh[d] = cl[d] + h;
          } else {
            ml[d] = ch[d] - h;
            mh[d] = ch[d];
          }
        }
        // The annulus cl..ch minus ml..mh as axis-peeled slabs.
        for (int d = 0; d < N; ++d) {
          std::vector<double> sl(N), sh(N);
          bool empty = false;
          for (int e = 0; e < N; ++e) {
            if (e < d) {
              sl[e] = ml[e];
              sh[e] = mh[e];
            } else if (e > d) {
              sl[e] = cl[e];
              sh[e] = ch[e];
            } else {
              if (corner[d] == cl[d]) {
                sl[e] = mh[d];
                sh[e] = ch[d];
              } else {
                sl[e] = cl[d];
                sh[e] = ml[d];
              }
            }
            if (!(sh[e] - sl[e] > 0.0)) empty = true;
          }
          if (!empty) emit(sl, sh);
        }
        for (int d = 0; d < N; ++d) {
          cl[d] = ml[d];
          ch[d] = mh[d];
        }
      }
      emit(cl, ch);
    }
    int d = 0;
    while (d < N && ++part[d] == 2) part[d++] = 0;
    if (d == N) break;
  }
}

}  // namespace mhlab
