#include "mhlab/evolution.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mhlab/errors.hpp"

namespace mhlab {
namespace {

std::vector<double> pole_centroid(const PoleConfiguration& config) {
  std::vector<double> cen(config.dimension, 0.0);
  for (const auto& pole : config.poles)
    for (int d = 0; d < config.dimension; ++d) cen[d] += pole[d];
  for (double& v : cen) v /= config.count();
  return cen;
}

// Quintic drop: 1 at s = 0, 0 at s >= 1, C^2.
double drop(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

}  // namespace

ControlBox default_control_box(const PoleConfiguration& config) {
  std::vector<double> cen = pole_centroid(config);
  NearestPole near = nearest_pole(config, cen);
  double half = 0.25 * config.r0;
  if (near.dist < 0.3 * config.r0) {
    cen = config.poles[near.index];
    cen[0] += 0.625 * config.r0;
    half = 0.125 * config.r0;
  }
  ControlBox box;
  box.lo.resize(config.dimension);
  box.hi.resize(config.dimension);
  for (int d = 0; d < config.dimension; ++d) {
    box.lo[d] = cen[d] - half;
    box.hi[d] = cen[d] + half;
  }
  return box;
}

Integrand default_initial_bump(const PoleConfiguration& config,
                               double box_half_width) {
  std::vector<double> cen = pole_centroid(config);
  std::vector<double> width(config.dimension);
  for (int d = 0; d < config.dimension; ++d) {
    width[d] = 0.9 * (box_half_width - std::abs(cen[d]));
    if (!(width[d] > 0.0))
      throw config_error("truncation box too small for the initial bump");
  }
  return [cen, width](std::span<const double> x) {
    double v = 1.0;
    for (size_t d = 0; d < cen.size() && v > 0.0; ++d)
      v *= drop(std::abs(x[d] - cen[d]) / width[d]);
    return v;
  };
}

EvolutionResult evolve(const DiscreteForms& forms, const Eigen::VectorXd& u0,
                       double T, double dt, const EvolveOptions& opts) {
  using Sparse = Eigen::SparseMatrix<double>;
  if (!(T > 0.0)) throw config_error("horizon must be positive");
  if (!(dt > 0.0) || dt > T) throw config_error("time step must be positive and at most the horizon");
  if (u0.size() != forms.dof_count())
    throw config_error("initial data size does not match the mesh");
  if (u0.minCoeff() < 0.0)
    throw config_error("initial data must be nonnegative");

  ControlBox box = opts.control.empty() ? default_control_box(forms.config())
                                        : opts.control;
  std::vector<long> k_dofs = forms.dofs_in_box(box.lo, box.hi);
  if (k_dofs.empty())
    throw config_error("no samples: control box contains no mesh nodes");

  const Eigen::VectorXd& M = forms.mass();
  auto m_norm = [&](const Eigen::VectorXd& u) {
    return std::sqrt((u.array().square() * M.array()).sum());
  };
  auto min_on_k = [&](const Eigen::VectorXd& u) {
    double m = u[k_dofs[0]];
    for (long dof : k_dofs) m = std::min(m, u[dof]);
    return m;
  };

  EvolutionResult run;
  EvolutionTrace& trace = run.trace;
  trace.dt = dt;
  trace.mesh_level = forms.mesh_level();
  trace.times.push_back(0.0);
  trace.norms.push_back(m_norm(u0));
  trace.min_on_K.push_back(min_on_k(u0));
  if (opts.record_states) run.states.push_back(u0);

  const long steps = std::lround(T / dt);
  Sparse B = forms.system();
  B *= dt;
  for (long i = 0; i < forms.dof_count(); ++i) B.coeffRef(i, i) += M[i];

  // Backward Euler is a parabolic step only while M + dt*A is positive
  // definite, i.e. 1 + dt*lambda_1 > 0 in the M-inner product. Past that
  // point the scheme damps the very mode that blows up, so an indefinite
  // operator is a breakdown, not something to hand to a solver. An exact
  // LDLT factorization certifies definiteness and then doubles as the
  // (deterministic) solver; CG remains as a fallback if the factorization
  // cannot be allocated on a very large mesh.
  Eigen::SimplicialLDLT<Sparse> ldlt;
  bool use_ldlt = false;
  try {
    ldlt.compute(B);
    if (ldlt.info() != Eigen::Success ||
        ldlt.vectorD().minCoeff() <= 0.0) {
      trace.breakdown = true;
      return run;
    }
    use_ldlt = true;
  } catch (const std::bad_alloc&) {
    use_ldlt = false;
  }

  Eigen::ConjugateGradient<Sparse, Eigen::Lower | Eigen::Upper,
                           Eigen::IncompleteCholesky<double>>
      cg;
  if (!use_ldlt) {
    cg.setTolerance(1e-12);
    cg.setMaxIterations(std::max<long>(4000, 4 * forms.dof_count()));
    cg.compute(B);
    if (cg.info() != Eigen::Success) {
      trace.breakdown = true;
      return run;
    }
  }

  Eigen::VectorXd u = u0;
  for (long k = 1; k <= steps; ++k) {
    Eigen::VectorXd rhs = M.asDiagonal() * u;
    Eigen::VectorXd next;
    Eigen::ComputationInfo info;
    if (use_ldlt) {
      next = ldlt.solve(rhs);
      info = ldlt.info();
    } else {
      next = cg.solve(rhs);
      info = cg.info();
    }
    // A reversed M-inner product against the previous state means the
    // implicit operator lost positive definiteness at this step size.
    double orientation = (next.array() * M.array() * u.array()).sum();
    if (info != Eigen::Success || !next.allFinite() ||
        (trace.norms.back() > 0.0 && orientation < 0.0)) {
      trace.breakdown = true;
      break;
    }
    u = next;
    double nrm = m_norm(u);
    if (!std::isfinite(nrm)) {
      trace.breakdown = true;
      break;
    }
    trace.times.push_back(k * dt);
    trace.norms.push_back(nrm);
    trace.min_on_K.push_back(min_on_k(u));
    if (opts.record_states) run.states.push_back(u);
    trace.steps_completed = k;
  }
  return run;
}

BoundFit fit_exponential_bound(const EvolutionTrace& trace) {
  const size_t n_all = trace.norms.size();
  // Zero norms cannot enter the log fit; use the strictly positive prefix.
  size_t n = 0;
  while (n < n_all && trace.norms[n] > 0.0 && std::isfinite(trace.norms[n]))
    ++n;
  BoundFit fit;
  if (n_all < 10 && n == n_all)
    throw config_error("trace too short: need at least 10 samples");
  if (n < 2) {
    fit.bounded = true;
    fit.samples_used = static_cast<long>(n);
    return fit;
  }
  double tbar = 0.0, ybar = 0.0;
  for (size_t k = 0; k < n; ++k) {
    tbar += trace.times[k];
    ybar += std::log(trace.norms[k]);
  }
  tbar /= n;
  ybar /= n;
  double sxy = 0.0, sxx = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double dtk = trace.times[k] - tbar;
    sxy += dtk * (std::log(trace.norms[k]) - ybar);
    sxx += dtk * dtk;
  }
  fit.omega = sxx > 0.0 ? sxy / sxx : 0.0;
  double intercept = ybar - fit.omega * tbar;
  double max_resid = 0.0;
  for (size_t k = 0; k < n; ++k) {
    double r = std::log(trace.norms[k]) - (intercept + fit.omega * trace.times[k]);
    max_resid = std::max(max_resid, std::abs(r));
  }
  fit.residual = max_resid;
  double y0 = std::log(trace.norms[0]);
  fit.prefactor = std::max(1.0, std::exp(intercept + max_resid - y0));
  fit.bounded = max_resid <= 0.1;
  fit.samples_used = static_cast<long>(n);
  return fit;
}

BlowupReport blowup_indicator(const WeightSpec& spec,
                              const PoleConfiguration& config, double c,
                              const std::vector<int>& mesh_levels, double T,
                              double dt, const MeshParams& base_params) {
  validate_weight_spec(spec);
  if (mesh_levels.empty()) throw config_error("no samples: empty mesh level list");
  if (!(T > 0.0)) throw config_error("horizon must be positive");
  if (dt <= 0.0) dt = 1e-3 * T;

  BlowupReport rep;
  rep.T = T;
  rep.dt = dt;
  Integrand bump = default_initial_bump(config, base_params.box_half_width);

  for (size_t li = 0; li < mesh_levels.size(); ++li) {
    MeshParams params = base_params;
    params.grading_layers = mesh_levels[li];
    DiscreteForms forms = assemble(spec, config, c, params);
    Eigen::VectorXd u0 = forms.interpolate(bump);
    double nrm = std::sqrt((u0.array().square() * forms.mass().array()).sum());
    if (nrm > 0.0) u0 /= nrm;
    EvolutionResult run = evolve(forms, u0, T, dt);
    rep.levels.push_back(mesh_levels[li]);
    if (run.trace.breakdown && run.trace.norms.size() < 10) {
      rep.breakdown_level = mesh_levels[li];
      rep.omegas.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
      break;
    }
    BoundFit fit = fit_exponential_bound(run.trace);
    rep.omegas.push_back(fit.omega);
    rep.residuals.push_back(fit.residual);
    if (run.trace.breakdown) {
      rep.breakdown_level = mesh_levels[li];
      break;
    }
  }

  const auto& w = rep.omegas;
  if (rep.breakdown_level >= 0) {
    rep.verdict = rep.breakdown_level == mesh_levels.front()
                      ? "inconclusive"
                      : "nonexistence-consistent";
  } else if (w.size() >= 2) {
    bool escalating = true;
    for (size_t k = 0; k + 1 < w.size(); ++k)
      escalating = escalating && w[k] > 0.0 && w[k + 1] >= 1.5 * w[k];
    double last = w[w.size() - 1], prev = w[w.size() - 2];
    bool stable = std::abs(last - prev) <= std::max(0.1 * std::abs(prev), 0.05);
    if (escalating)
      rep.verdict = "nonexistence-consistent";
    else if (stable)
      rep.verdict = "existence-consistent";
    else
      rep.verdict = "inconclusive";
  } else {
    rep.verdict = "inconclusive";
  }
  return rep;
}

PositivityReport positivity_check(const DiscreteForms& forms,
                                  const EvolutionResult& run,
                                  const ControlBox& K,
                                  const Eigen::VectorXd& u0) {
  const PoleConfiguration& config = forms.config();
  ControlBox box = K.empty() ? default_control_box(config) : K;
  // K must stay clear of the pole balls B(a_i, 1e-2 r0).
  for (const auto& pole : config.poles) {
    double dist_sq = 0.0;
    for (int d = 0; d < config.dimension; ++d) {
      double gap = 0.0;
      if (pole[d] < box.lo[d]) gap = box.lo[d] - pole[d];
      if (pole[d] > box.hi[d]) gap = pole[d] - box.hi[d];
      dist_sq += gap * gap;
    }
    if (dist_sq < 1e-4 * config.r0 * config.r0)
      throw config_error("control box too close to a pole");
  }

  PositivityReport rep;
  if (u0.size() != forms.dof_count())
    throw config_error("initial data size does not match the mesh");
  if (u0.maxCoeff() <= 0.0) {
    rep.verdict = "zero initial data";
    return rep;
  }

  std::vector<long> k_dofs = forms.dofs_in_box(box.lo, box.hi);
  if (k_dofs.empty())
    throw config_error("no samples: control box contains no mesh nodes");
  double mass0 = 0.0;
  for (long dof : k_dofs) mass0 += forms.mass()[dof] * u0[dof];
  if (!(mass0 > 0.0)) {
    rep.verdict = "zero initial data";
    return rep;
  }

  const EvolutionTrace& trace = run.trace;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  bool violated = false;
  for (size_t k = 0; k < trace.times.size(); ++k) {
    double min_val;
    long min_dof = -1;
    if (!run.states.empty()) {
      const Eigen::VectorXd& u = run.states[k];
      min_val = u[k_dofs[0]];
      min_dof = k_dofs[0];
      for (long dof : k_dofs)
        if (u[dof] < min_val) {
          min_val = u[dof];
          min_dof = dof;
        }
    } else {
      min_val = trace.min_on_K[k];
    }
    rep.min_ratio = std::min(rep.min_ratio, min_val / mass0);
    if (min_val <= 0.0 && !violated) {
      violated = true;
      rep.worst_value = min_val;
      rep.worst_time = trace.times[k];
      if (min_dof >= 0) rep.worst_location = forms.dof_point(min_dof);
      std::ostringstream os;
      os << "positivity violated at t=" << trace.times[k]
         << ", min u=" << min_val;
      if (min_dof >= 0) {
        os << ", x=(";
        for (size_t d = 0; d < rep.worst_location.size(); ++d)
          os << (d ? "," : "") << rep.worst_location[d];
        os << ")";
      }
      rep.detail = os.str();
    }
  }
  rep.verdict = violated ? "positivity violated" : "positive";
  return rep;
}

}  // namespace mhlab
