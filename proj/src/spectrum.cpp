#include "mhlab/spectrum.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <map>

#include "mhlab/errors.hpp"
#include "mhlab/hardy.hpp"

namespace mhlab {
namespace {

// One axis of the tensor mesh: uniform base panels plus graded planes
// a_d +- r0 2^{-j} around every pole coordinate. Base nodes inside a quarter
// of the finest offset are dropped so no node lands on (or crowds) a pole.
std::vector<double> axis_nodes(const PoleConfiguration& config,
                               const MeshParams& p, int d) {
  const double L = p.box_half_width;
  const double h_min = config.r0 * std::ldexp(1.0, -p.grading_layers);
  std::vector<double> nodes;
  for (int i = 0; i <= p.panels_per_axis; ++i) {
    double x = -L + 2.0 * L * i / p.panels_per_axis;
    bool crowds_pole = false;
    for (const auto& pole : config.poles) {
      if (std::abs(x - pole[d]) < 0.25 * h_min) {
        crowds_pole = true;
        break;
      }
    }
    if (!crowds_pole) nodes.push_back(x);
  }
  for (const auto& pole : config.poles) {
    for (int j = 0; j <= p.grading_layers; ++j) {
      double off = config.r0 * std::ldexp(1.0, -j);
      for (double s : {-1.0, 1.0}) {
        double x = pole[d] + s * off;
        if (x > -L && x < L) nodes.push_back(x);
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  double tol = 0.01 * h_min;
  nodes.erase(std::unique(nodes.begin(), nodes.end(),
                          [tol](double a, double b) { return b - a < tol; }),
              nodes.end());
  nodes.front() = -L;
  nodes.back() = L;
  return nodes;
}

struct CellQuadrature {
  // Per-node multilinear basis values and gradients on the current cell,
  // reused across quadrature nodes to avoid allocation.
  int N = 0;
  int nv = 0;  // 2^N vertices
  std::vector<double> lo, hi;
  std::vector<double> b0, b1, g0, g1;    // per-axis 1-d values/derivatives
  std::vector<double> val;               // nv
  std::vector<double> grad;              // nv x N
  std::vector<double> Sloc, Ploc, Mloc;  // nv x nv, nv x nv, nv

  explicit CellQuadrature(int dim)
      : N(dim),
        nv(1 << dim),
        lo(dim),
        hi(dim),
        b0(dim),
        b1(dim),
        g0(dim),
        g1(dim),
        val(nv),
        grad(static_cast<size_t>(nv) * dim),
        Sloc(static_cast<size_t>(nv) * nv),
        Ploc(static_cast<size_t>(nv) * nv),
        Mloc(nv) {}

  void reset_cell(std::span<const double> cell_lo,
                  std::span<const double> cell_hi) {
    std::copy(cell_lo.begin(), cell_lo.end(), lo.begin());
    std::copy(cell_hi.begin(), cell_hi.end(), hi.begin());
    std::fill(Sloc.begin(), Sloc.end(), 0.0);
    std::fill(Ploc.begin(), Ploc.end(), 0.0);
    std::fill(Mloc.begin(), Mloc.end(), 0.0);
  }

  void accumulate(std::span<const double> x, double w, const WeightSpec& spec,
                  const PoleConfiguration& config) {
    double mu = eval_weight(spec, x);
    if (mu == 0.0) return;
    double V = multipolar_potential(config, x);
    for (int d = 0; d < N; ++d) {
      double h = hi[d] - lo[d];
      double xi = (x[d] - lo[d]) / h;
      b1[d] = xi;
      b0[d] = 1.0 - xi;
      g1[d] = 1.0 / h;
      g0[d] = -1.0 / h;
    }
    for (int v = 0; v < nv; ++v) {
      double value = 1.0;
      for (int d = 0; d < N; ++d) value *= ((v >> d) & 1) ? b1[d] : b0[d];
      val[v] = value;
      for (int e = 0; e < N; ++e) {
        double gv = ((v >> e) & 1) ? g1[e] : g0[e];
        for (int d = 0; d < N; ++d) {
          if (d == e) continue;
          gv *= ((v >> d) & 1) ? b1[d] : b0[d];
        }
        grad[static_cast<size_t>(v) * N + e] = gv;
      }
    }
    double wm = w * mu;
    double wmv = wm * V;
    for (int a = 0; a < nv; ++a) {
      Mloc[a] += wm * val[a];
      const double* ga = grad.data() + static_cast<size_t>(a) * N;
      for (int b = a; b < nv; ++b) {
        const double* gb = grad.data() + static_cast<size_t>(b) * N;
        double dot = 0.0;
        for (int d = 0; d < N; ++d) dot += ga[d] * gb[d];
        Sloc[static_cast<size_t>(a) * nv + b] += wm * dot;
        Ploc[static_cast<size_t>(a) * nv + b] += wmv * val[a] * val[b];
      }
    }
  }

  void mirror() {
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < a; ++b) {
        Sloc[static_cast<size_t>(a) * nv + b] =
            Sloc[static_cast<size_t>(b) * nv + a];
        Ploc[static_cast<size_t>(a) * nv + b] =
            Ploc[static_cast<size_t>(b) * nv + a];
      }
    }
  }
};

std::vector<double> unflatten_node(long node, const std::vector<long>& dims,
                                   const std::vector<std::vector<double>>& axes) {
  int N = static_cast<int>(dims.size());
  std::vector<double> x(N);
  for (int d = N - 1; d >= 0; --d) {
    x[d] = axes[d][node % dims[d]];
    node /= dims[d];
  }
  return x;
}

}  // namespace

std::vector<double> DiscreteForms::dof_point(long dof) const {
  return unflatten_node(node_of_dof_[dof], dims_, axes_);
}

std::vector<long> DiscreteForms::dofs_in_box(std::span<const double> lo,
                                             std::span<const double> hi) const {
  std::vector<long> out;
  for (long dof = 0; dof < dof_count(); ++dof) {
    auto x = dof_point(dof);
    bool inside = true;
    for (int d = 0; d < config_.dimension && inside; ++d)
      inside = x[d] >= lo[d] && x[d] <= hi[d];
    if (inside) out.push_back(dof);
  }
  return out;
}

Eigen::VectorXd DiscreteForms::interpolate(
    const std::function<double(std::span<const double>)>& f) const {
  Eigen::VectorXd u(dof_count());
  for (long dof = 0; dof < dof_count(); ++dof) {
    auto x = dof_point(dof);
    u[dof] = f(x);
  }
  return u;
}

DiscreteForms assemble(const WeightSpec& spec, const PoleConfiguration& config,
                       double c, const MeshParams& params) {
  validate_weight_spec(spec);
  const int N = config.dimension;
  if (params.panels_per_axis < 2)
    throw config_error("panels_per_axis must be at least 2");
  if (params.grading_layers < 0)
    throw config_error("grading_layers must be nonnegative");
  for (const auto& pole : config.poles)
    for (int d = 0; d < N; ++d)
      if (std::abs(pole[d]) + config.r0 > params.box_half_width + 1e-12)
        throw config_error("truncation box too small for the pole balls");

  DiscreteForms forms;
  forms.c_ = c;
  forms.config_ = config;
  forms.spec_ = spec;
  forms.params_ = params;
  forms.axes_.resize(N);
  forms.dims_.resize(N);
  long long total_nodes = 1;
  for (int d = 0; d < N; ++d) {
    forms.axes_[d] = axis_nodes(config, params, d);
    forms.dims_[d] = static_cast<long>(forms.axes_[d].size());
    total_nodes *= forms.dims_[d];
    if (total_nodes > (1LL << 31))
      throw config_error("mesh too large: node count exceeds 2^31");
  }

  // Interior nodes carry dofs; boundary values are zero.
  std::vector<long> dof_of_node(static_cast<size_t>(total_nodes), -1);
  {
    std::vector<long> idx(N, 0);
    long dof = 0;
    for (long long node = 0; node < total_nodes; ++node) {
      bool interior = true;
      for (int d = 0; d < N; ++d)
        if (idx[d] == 0 || idx[d] == forms.dims_[d] - 1) {
          interior = false;
          break;
        }
      if (interior) {
        dof_of_node[static_cast<size_t>(node)] = dof;
        forms.node_of_dof_.push_back(static_cast<long>(node));
        ++dof;
      }
      for (int d = N - 1; d >= 0; --d) {
        if (++idx[d] < forms.dims_[d]) break;
        idx[d] = 0;
      }
    }
  }
  const long n_dofs = static_cast<long>(forms.node_of_dof_.size());
  if (n_dofs == 0) throw config_error("mesh too coarse: no interior nodes");

  // Locate the cell holding each pole; grading keeps poles cell-interior.
  std::vector<long> cells(N);
  std::vector<long> cell_stride(N);
  long long total_cells = 1;
  for (int d = N - 1; d >= 0; --d) {
    cells[d] = forms.dims_[d] - 1;
    cell_stride[d] = total_cells;
    total_cells *= cells[d];
  }
  std::map<long long, int> pole_cell;
  for (int i = 0; i < config.count(); ++i) {
    long long flat = 0;
    for (int d = 0; d < N; ++d) {
      const auto& ax = forms.axes_[d];
      auto it = std::upper_bound(ax.begin(), ax.end(), config.poles[i][d]);
      long cell = static_cast<long>(it - ax.begin()) - 1;
      cell = std::clamp(cell, 0L, cells[d] - 1);
      flat += cell * cell_stride[d];
    }
    if (!pole_cell.emplace(flat, i).second)
      throw config_error("pole cells overlap: refine the mesh or separate the poles");
  }

  auto& S = forms.S_;
  auto& P = forms.P_;
  S.resize(n_dofs, n_dofs);
  P.resize(n_dofs, n_dofs);
  long cap = 1;
  for (int d = 0; d < N; ++d) cap = std::min<long>(cap * 3, n_dofs);
  S.reserve(Eigen::VectorXi::Constant(n_dofs, static_cast<int>(cap)));
  P.reserve(Eigen::VectorXi::Constant(n_dofs, static_cast<int>(cap)));
  forms.M_ = Eigen::VectorXd::Zero(n_dofs);

  const Gauss1d& cell_gauss = gauss_legendre(std::max(2, params.cell_order));
  const int q = static_cast<int>(cell_gauss.x.size());

  CellQuadrature cq(N);
  std::vector<double> lo(N), hi(N), xq(N);
  std::vector<long> cidx(N, 0);
  std::vector<int> qidx(N, 0);
  std::vector<long> node_stride(N);
  {
    long long s = 1;
    for (int d = N - 1; d >= 0; --d) {
      node_stride[d] = static_cast<long>(s);
      s *= forms.dims_[d];
    }
  }

  for (long long cell = 0; cell < total_cells; ++cell) {
    for (int d = 0; d < N; ++d) {
      lo[d] = forms.axes_[d][cidx[d]];
      hi[d] = forms.axes_[d][cidx[d] + 1];
    }
    cq.reset_cell(lo, hi);

    auto it = pole_cell.find(cell);
    if (it != pole_cell.end()) {
      dyadic_box_quadrature(
          lo, hi, config.poles[it->second], params.pole_cell_levels,
          std::max(2, params.cell_order),
          [&](std::span<const double> x, double w) {
            cq.accumulate(x, w, spec, config);
          });
    } else {
      std::fill(qidx.begin(), qidx.end(), 0);
      long long q_total = 1;
      for (int d = 0; d < N; ++d) q_total *= q;
      for (long long node = 0; node < q_total; ++node) {
        double w = 1.0;
        for (int d = 0; d < N; ++d) {
          double half = 0.5 * (hi[d] - lo[d]);
          xq[d] = lo[d] + half * (1.0 + cell_gauss.x[qidx[d]]);
          w *= half * cell_gauss.w[qidx[d]];
        }
        cq.accumulate(xq, w, spec, config);
        for (int d = N - 1; d >= 0; --d) {
          if (++qidx[d] < q) break;
          qidx[d] = 0;
        }
      }
    }
    cq.mirror();

    // Scatter to global forms; only interior vertices carry dofs.
    for (int a = 0; a < cq.nv; ++a) {
      long long node_a = 0;
      for (int d = 0; d < N; ++d)
        node_a += (cidx[d] + ((a >> d) & 1)) * node_stride[d];
      long ga = dof_of_node[static_cast<size_t>(node_a)];
      if (ga < 0) continue;
      forms.M_[ga] += cq.Mloc[a];
      for (int b = 0; b < cq.nv; ++b) {
        long long node_b = 0;
        for (int d = 0; d < N; ++d)
          node_b += (cidx[d] + ((b >> d) & 1)) * node_stride[d];
        long gb = dof_of_node[static_cast<size_t>(node_b)];
        if (gb < 0) continue;
        double sv = cq.Sloc[static_cast<size_t>(a) * cq.nv + b];
        double pv = cq.Ploc[static_cast<size_t>(a) * cq.nv + b];
        if (sv != 0.0) S.coeffRef(ga, gb) += sv;
        if (pv != 0.0) P.coeffRef(ga, gb) += pv;
      }
    }

    for (int d = N - 1; d >= 0; --d) {
      if (++cidx[d] < cells[d]) break;
      cidx[d] = 0;
    }
  }
  S.makeCompressed();
  P.makeCompressed();
  return forms;
}

SpectrumResult lambda1(const DiscreteForms& forms, double tol, int max_iter) {
  using Sparse = Eigen::SparseMatrix<double>;
  const long n = forms.dof_count();
  SpectrumResult res;
  res.mesh_level = forms.mesh_level();
  res.verdict = "inconclusive";

  Sparse A = forms.system();
  const Eigen::VectorXd& M = forms.mass();
  auto m_norm = [&](const Eigen::VectorXd& u) {
    return std::sqrt((u.array().square() * M.array()).sum());
  };

  auto m_dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a.array() * M.array() * b.array()).sum();
  };

  // Preconditioner: the inverse of A - sigma*M applied by conjugate
  // gradients, with sigma backed off below the target Rayleigh quotient by
  // doubling until the incomplete factorization accepts the shifted operator
  // as positive definite. P must outlive the solver. The shift follows the
  // quotient downward so the applications stay close to inverse iteration.
  Eigen::ConjugateGradient<Sparse, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  cg.setTolerance(1e-4);
  cg.setMaxIterations(400);
  Sparse P;
  double sigma_p = 0.0;
  auto rebuild_precond = [&](double target) {
    double gap = 0.1 * (1.0 + std::abs(target));
    for (int k = 0; k < 60; ++k) {
      double sigma = target - gap;
      P = A;
      for (long i = 0; i < n; ++i) P.coeffRef(i, i) -= sigma * M[i];
      cg.compute(P);
      if (cg.info() == Eigen::Success) {
        sigma_p = sigma;
        return true;
      }
      gap *= 2.0;
    }
    return false;
  };

  // Ground states concentrate in the finest graded cells, where the all-ones
  // start has vanishing overlap. Fixed pole-bump vectors keep that part of
  // the space represented in every Rayleigh-Ritz step.
  std::vector<Eigen::VectorXd> pole_bumps;
  {
    const PoleConfiguration& config = forms.config();
    double ell = config.r0 * std::pow(0.5, forms.params().grading_layers);
    for (int i = 0; i < config.count(); ++i) {
      Eigen::VectorXd q(n);
      for (long dof = 0; dof < n; ++dof) {
        std::vector<double> xd = forms.dof_point(dof);
        q[dof] = std::exp(-distance(xd, config.poles[i]) / ell);
      }
      double nq = m_norm(q);
      if (nq > 0.0 && std::isfinite(nq)) pole_bumps.push_back(q / nq);
    }
  }

  // Locally optimal preconditioned descent: minimize the Rayleigh quotient
  // over span{x, (A-sigma*M)^{-1} r, previous step, pole bumps}. The
  // quotient is nonincreasing by construction, so the iteration cannot be
  // trapped above a lower eigenvalue the way a tracked-shift inverse
  // iteration can.
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x /= m_norm(x);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  double rho = x.dot(A * x);

  if (!rebuild_precond(rho)) throw numeric_error("indefinite shift retry exceeded");

  for (int it = 1; it <= max_iter; ++it) {
    // Refresh the shift once the quotient has dropped well below it; a stale
    // factorization still works but contracts slowly.
    if (rho - sigma_p > 2.0 * (1.0 + std::abs(rho)) || it % 25 == 0)
      rebuild_precond(rho);
    Eigen::VectorXd Mx = M.asDiagonal() * x;
    Eigen::VectorXd r = A * x - rho * Mx;
    double residual = r.norm() / Mx.norm();
    res.lambda1 = rho;
    res.eigenvector = x;
    res.iterations = it;
    res.residual = residual;
    if (residual <= tol * (1.0 + std::abs(rho))) {
      res.verdict = "converged";
      break;
    }

    Eigen::VectorXd w = cg.solve(r);
    if (!w.allFinite()) break;

    std::vector<const Eigen::VectorXd*> candidates = {&w, &p};
    for (const auto& q : pole_bumps) candidates.push_back(&q);
    std::vector<Eigen::VectorXd> basis;
    basis.push_back(x);
    for (const Eigen::VectorXd* cand : candidates) {
      Eigen::VectorXd v = *cand;
      double nv0 = m_norm(v);
      if (!(nv0 > 0.0) || !std::isfinite(nv0)) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= m_dot(b, v) * b;
      double nv = m_norm(v);
      if (nv > 1e-10 * nv0 && std::isfinite(nv)) basis.push_back(v / nv);
    }
    if (basis.size() < 2) break;

    const int k = static_cast<int>(basis.size());
    std::vector<Eigen::VectorXd> Abasis(k);
    for (int j = 0; j < k; ++j) Abasis[j] = A * basis[j];
    Eigen::MatrixXd At(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) At(i, j) = basis[i].dot(Abasis[j]);
    At = 0.5 * (At + At.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(At);
    Eigen::VectorXd y = es.eigenvectors().col(0);

    Eigen::VectorXd xnew = y[0] * basis[0];
    Eigen::VectorXd pnew = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < k; ++j) pnew += y[j] * basis[j];
    xnew += pnew;
    double nx = m_norm(xnew);
    if (!(nx > 0.0) || !std::isfinite(nx)) break;
    x = xnew / nx;
    p = pnew;
    rho = es.eigenvalues()(0);
  }
  return res;
}

double choose_eta(double c, int N, double k2) {
  double c_o = hardy_constant(N, k2);
  if (!(c > 0.0) || !std::isfinite(c))
    throw config_error("constant out of range: c must be positive");
  double lo = std::max(-std::sqrt(c), -0.5 * (N + k2));
  double hi = std::min(-0.5 * (N + k2 - 2.0), 0.0);
  // The interval is nonempty exactly for c > c_o; require workable margins.
  if (!(c > c_o) || !(hi - lo > 2e-9))
    throw config_error("witness requires c > c_o");
  return 0.5 * (lo + hi);
}

namespace {

// Quintic ramp p(s) = s^3 (10 - 15 s + 6 s^2) and derivative, C^2 on [0, 1].
double ramp(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double ramp_deriv(double s) { return s * s * (30.0 + s * (-60.0 + 30.0 * s)); }

struct WitnessShape {
  std::vector<double> a;
  double eta = 0.0;
  double eps = 0.0;

  double radial(double t) const {
    if (t >= 2.0) return 0.0;
    double theta = t <= 1.0 ? 1.0 : ramp(2.0 - t);
    return std::pow(eps + t, eta) * theta;
  }
  // d/dt of radial(t); the cutoff contributes only on 1 < t < 2.
  double radial_deriv(double t) const {
    if (t >= 2.0) return 0.0;
    double theta = 1.0, dtheta = 0.0;
    if (t > 1.0) {
      theta = ramp(2.0 - t);
      dtheta = -ramp_deriv(2.0 - t);
    }
    double p = std::pow(eps + t, eta);
    return eta * p / (eps + t) * theta + p * dtheta;
  }
};

}  // namespace

TestFunction make_witness(const PoleConfiguration& config,
                          const WitnessSpec& witness) {
  if (witness.pole_index < 0 || witness.pole_index >= config.count())
    throw config_error("pole index out of range");
  if (!(witness.epsilon > 0.0))
    throw config_error("each eps must be positive");
  WitnessShape shape{config.poles[witness.pole_index], witness.eta,
                     witness.epsilon};
  TestFunction fn;
  fn.value = [shape](std::span<const double> x) {
    return shape.radial(distance(x, shape.a));
  };
  fn.gradient = [shape](std::span<const double> x, std::span<double> g) {
    double t = distance(x, shape.a);
    if (t >= 2.0 || t == 0.0) {
      std::fill(g.begin(), g.end(), 0.0);
      return;
    }
    double dv = shape.radial_deriv(t);
    for (size_t d = 0; d < g.size(); ++d) g[d] = dv * (x[d] - shape.a[d]) / t;
  };
  return fn;
}

double witness_quotient(const WeightSpec& spec, const PoleConfiguration& config,
                        const WitnessSpec& witness, double c,
                        const QuadratureRule& rule) {
  TestFunction phi = make_witness(config, witness);
  QuadraticForm qf = quadratic_form(phi, spec, config, c, rule);
  if (!(qf.mass > 0.0) || !std::isfinite(qf.mass))
    throw inconclusive_error("inconclusive: witness mass not resolved");
  return qf.Q / qf.mass;
}

double witness_quotient(const WeightSpec& spec, const PoleConfiguration& config,
                        const WitnessSpec& witness, double c) {
  TestFunction phi = make_witness(config, witness);
  const int i = witness.pole_index;
  if (i < 0 || i >= config.count())
    throw config_error("pole index out of range");

  // The support is B(a_i, 2); the radial rule needs every other pole outside.
  bool radial_ok = true;
  for (int j = 0; j < config.count() && radial_ok; ++j)
    if (j != i &&
        distance(config.poles[j], config.poles[i]) < 2.0 + config.r0)
      radial_ok = false;

  if (!radial_ok) {
    double L = 0.0;
    for (const auto& pole : config.poles)
      for (double coord : pole)
        L = std::max(L, std::abs(coord) + std::max(config.r0, 2.0));
    QuadratureOptions qopts;
    qopts.r_min_ratio =
        std::min(1e-6, 1e-3 * witness.epsilon / std::max(config.r0, 1e-30));
    QuadratureRule rule = build_rule(config, 1.05 * L, qopts);
    return witness_quotient(spec, config, witness, c, rule);
  }

  const double R = 2.0;
  const double r_cut = std::min(1e-7, 1e-3 * witness.epsilon);
  BallRuleOptions bopts;
  bopts.radial_order = 10;
  bopts.angular_order = 8;
  bopts.outer_panels = 6;
  std::vector<double> grad(config.dimension);
  auto numerator = [&](std::span<const double> x) {
    phi.gradient(x, grad);
    double g2 = 0.0;
    for (double gd : grad) g2 += gd * gd;
    double value = phi.value(x);
    return g2 - c * multipolar_potential(config, x) * value * value;
  };
  auto mass = [&](std::span<const double> x) {
    double value = phi.value(x);
    return value * value;
  };
  double num = integrate_ball(config, spec, i, R, r_cut, numerator, bopts);
  double den = integrate_ball(config, spec, i, R, r_cut, mass, bopts);
  if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
    throw inconclusive_error("inconclusive: witness mass not resolved");
  return num / den;
}

OptimalityReport optimality_sweep(const WeightSpec& spec,
                                  const PoleConfiguration& config, double c,
                                  const std::vector<double>& eps_list,
                                  const std::vector<int>& mesh_levels,
                                  double threshold,
                                  const MeshParams& base_params) {
  validate_weight_spec(spec);
  double c_o = hardy_constant(config.dimension, spec.k2);
  if (!(c > c_o)) throw config_error("sweep requires supercritical c");
  if (eps_list.empty() && mesh_levels.empty())
    throw config_error("no samples: empty eps list and mesh level list");

  OptimalityReport rep;
  rep.c = c;
  rep.c_o = c_o;
  rep.threshold = threshold;
  rep.eta = choose_eta(c, config.dimension, spec.k2);
  rep.conditional_on_h3 = spec.has_custom();

  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw config_error("each eps must be positive");
    WitnessSpec w{0, rep.eta, eps};
    double quotient = witness_quotient(spec, config, w, c);
    rep.eps_list.push_back(eps);
    rep.quotients.push_back(quotient);
    if (quotient < threshold) rep.witness_diverged = true;
  }

  for (int level : mesh_levels) {
    MeshParams params = base_params;
    params.grading_layers = level;
    DiscreteForms forms = assemble(spec, config, c, params);
    SpectrumResult sr = lambda1(forms);
    rep.mesh_levels.push_back(level);
    rep.lambda_values.push_back(sr.lambda1);
    if (sr.verdict == "converged" && sr.lambda1 < threshold)
      rep.lambda_diverged = true;
  }

  rep.verdict = (rep.witness_diverged && rep.lambda_diverged)
                    ? "optimality confirmed"
                    : "optimality not confirmed";
  return rep;
}

}  // namespace mhlab
