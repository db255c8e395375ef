// Acceptance gate: one self-contained check per numbered criterion, each
// printing a single PASS/FAIL line with its runtime and a short detail
// string. The process exit code is the number of failed criteria, so ctest
// can register each criterion as its own test via the argv selector.
#include <mhlab/config.hpp>
#include <mhlab/errors.hpp>
#include <mhlab/evolution.hpp>
#include <mhlab/geometry.hpp>
#include <mhlab/hardy.hpp>
#include <mhlab/partition.hpp>
#include <mhlab/quadrature.hpp>
#include <mhlab/rng.hpp>
#include <mhlab/spectrum.hpp>
#include <mhlab/weights.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using mhlab::build_configuration;
using mhlab::hardy_constant;
using mhlab::MeshParams;
using mhlab::PoleConfiguration;
using mhlab::WeightSpec;

constexpr double kPiSq = 9.869604401089358;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

PoleConfiguration two_poles() {
  return build_configuration({{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 3, 1.0);
}

WeightSpec lebesgue(const PoleConfiguration& poles) {
  WeightSpec spec;
  spec.poles = poles;
  return spec;
}

// gamma = 0.5, delta = 1, m = 2 member of the built-in family with the
// integrability-matching k2 = -gamma.
WeightSpec graded_weight(const PoleConfiguration& poles) {
  WeightSpec spec;
  spec.gamma = 0.5;
  spec.delta = 1.0;
  spec.m = 2.0;
  spec.k2 = -0.5;
  spec.poles = poles;
  return spec;
}

// ---------------------------------------------------------------------------
// 1. Cross-term identity on randomized pole sets.
Outcome criterion1() {
  mhlab::Rng rng(20260821);
  const long total = 100000;
  long cases = 0;
  double worst = 0.0;
  const int dims[] = {3, 4, 5};
  const int counts[] = {2, 3, 4};
  while (cases < total) {
    int N = dims[cases % 3];
    int n = counts[(cases / 3) % 3];
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) {
      std::vector<double> p(N);
      for (int d = 0; d < N; ++d) p[d] = rng.uniform(-3.0, 3.0);
      pts.push_back(std::move(p));
    }
    PoleConfiguration config;
    try {
      config = build_configuration(std::move(pts), N);
    } catch (const mhlab::Error&) {
      continue;  // coincident draw
    }
    std::vector<double> x(N);
    for (int d = 0; d < N; ++d) x[d] = rng.uniform(-4.0, 4.0);
    // Keep the evaluation off the poles: the identity is exact in reals,
    // and a 0.3 standoff keeps the floating-point terms below ~1e2 so the
    // 1e-11 residual gate measures algebra, not rounding blowup.
    if (mhlab::nearest_pole(config, x).dist < 0.3) continue;
    worst = std::max(worst, mhlab::cross_term_residual(config, x));
    ++cases;
  }
  Outcome out;
  out.pass = worst <= 1e-11;
  out.detail = "1e5 cases, max residual " + fmt(worst) + " (gate 1e-11)";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Partition invariants and the exact profile value.
Outcome criterion2() {
  auto poles = two_poles();
  auto partition = mhlab::build_partition(poles);
  auto samples = mhlab::make_drift_samples(poles, 3.0, 10000, 29, 1e-9, false);
  auto check = mhlab::verify_partition(partition, samples);

  double profile_err =
      std::abs(mhlab::eval_profile(0.75).value - std::sin(0.75 * std::numbers::pi));

  Outcome out;
  out.pass = check.evaluated > 0 && check.max_sum_residual <= 1e-10 &&
             check.max_orthogonality <= 1e-10 &&
             check.max_identity_d <= 1e-10 &&
             check.max_support_overlap == 0.0 && profile_err <= 1e-15;
  out.detail = "sum residual " + fmt(check.max_sum_residual) +
               ", orthogonality " + fmt(check.max_orthogonality) +
               ", identity d " + fmt(check.max_identity_d) + ", J(0.75) err " +
               fmt(profile_err);
  return out;
}

// ---------------------------------------------------------------------------
// 3. k0 below pi^2 and the pointwise bound behind it.
Outcome criterion3() {
  auto poles = two_poles();
  auto partition = mhlab::build_partition(poles);
  double r0 = poles.r0;

  auto box_samples = mhlab::make_drift_samples(poles, 3.0, 10000, 31, 1e-9, false);
  auto ball_samples = mhlab::make_ball_samples(poles, 5000, 37);

  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  std::vector<double> values(3), grads(9);
  for (double c : {0.1, 0.25, 1.0}) {
    double k0 = mhlab::compute_k0(partition, c);
    bool below = k0 < kPiSq;
    // Re-check the sup pointwise on fresh samples. The slack covers the
    // shrinking-box maximizer's terminal resolution (~1e-5 near contact)
    // plus the cancellation noise of 1 - J^2 near the inner kink.
    double cap = k0 + 2.0 * c + 2e-5 * (1.0 + c);
    double worst_excess = -1e300;
    long checked = 0;
    auto probe = [&](std::span<const double> x) {
      partition.eval(x, values, grads);
      double expr = 0.0;
      for (int i = 0; i < 2; ++i) {
        double denom = 1.0 - values[i] * values[i];
        if (denom < 1e-4) {
          double gg = 0.0;
          for (int d = 0; d < 3; ++d) gg += grads[i * 3 + d] * grads[i * 3 + d];
          if (gg == 0.0) continue;  // plateau: the ratio is identically 0
          return;                   // kink band: the ratio cannot be resolved
        }
        double gg = 0.0;
        for (int d = 0; d < 3; ++d) gg += grads[i * 3 + d] * grads[i * 3 + d];
        expr += gg / denom;
      }
      double j_out = values[2];
      expr += c * j_out * j_out * mhlab::multipolar_potential(poles, x);
      expr *= r0 * r0;
      worst_excess = std::max(worst_excess, expr - cap);
      ++checked;
    };
    for (long k = 0; k < box_samples.count(); ++k) probe(box_samples.point(k));
    for (long k = 0; k < ball_samples.count(); ++k) probe(ball_samples.point(k));

    bool pointwise = worst_excess <= 0.0;
    out.pass = out.pass && below && pointwise && checked > 0;
    detail << "c=" << fmt(c) << ": k0=" << fmt(k0)
           << (below ? " < pi^2" : " >= pi^2 (!)") << ", max excess "
           << fmt(worst_excess) << "; ";
  }
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 4. Closed-form constants.
Outcome criterion4() {
  Outcome out;
  bool exact = hardy_constant(3, 0.0) == 0.25 && hardy_constant(4, 0.0) == 1.0;

  bool coincide = true;
  for (double eps : {0.5, 1.0, 2.0}) {
    for (int N : {3, 4}) {
      double c_o = hardy_constant(N, 0.0);
      double c_star = c_o / (1.0 + eps / 2.0);
      auto vf = mhlab::vector_field_constants(2, c_star, 1.0, eps, 0.0, N, 0.0);
      coincide = coincide && std::abs(vf.beta_plus - vf.beta_minus) <=
                                 1e-10 * (1.0 + std::abs(vf.beta_plus));
    }
  }

  // Library maximizer value against a golden-section search oracle.
  auto golden_max = [](const std::function<double(double)>& f, double a,
                       double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 1e-13) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = f(d);
      }
    }
    return f(0.5 * (a + b));
  };
  double max_err = 0.0;
  for (int n : {1, 2, 3, 4}) {
    for (int N : {3, 4, 5}) {
      for (double k2 : {-0.5, 0.0, 1.0}) {
        double closed = (N + k2 - 2.0) * (N + k2 - 2.0) / (4.0 * n);
        double beta = mhlab::beta_cross_max(n, N, k2);
        double at_beta = (N + k2 - 2.0) * beta - n * beta * beta;
        double numeric = golden_max(
            [&](double b) { return (N + k2 - 2.0) * b - n * b * b; }, 0.0, 4.0);
        max_err = std::max(max_err, std::abs(at_beta - closed));
        max_err = std::max(max_err, std::abs(numeric - closed));
      }
    }
  }

  out.pass = exact && coincide && max_err <= 1e-10;
  out.detail = std::string("c_o exact: ") + (exact ? "yes" : "NO") +
               ", beta branches coincide: " + (coincide ? "yes" : "NO") +
               ", maximizer error " + fmt(max_err);
  return out;
}

// Shared runner for criteria 5 and 6: margins of the regression family
// under one method for one weight.
struct FamilyStats {
  double worst_margin_gap = 1e300;  // min over members of margin + quad_error
  int members = 0;
  bool all_hold = true;
};
FamilyStats run_family(const WeightSpec& spec, const PoleConfiguration& poles,
                       double c, mhlab::HardyMethod method,
                       const mhlab::QuadratureRule& rule,
                       const mhlab::CheckOptions& opts) {
  auto family = mhlab::regression_family(poles, 3.0, 4242);
  FamilyStats stats;
  stats.members = static_cast<int>(family.size());
  for (const auto& member : family) {
    auto rep = mhlab::check_inequality(member.fn, spec, poles, c, method, rule,
                                       opts);
    double gap = rep.margin + rep.quadrature_error;
    stats.worst_margin_gap = std::min(stats.worst_margin_gap, gap);
    stats.all_hold = stats.all_hold && gap >= 0.0;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// 5. IMS inequality for Lebesgue and for the graded weight with audited k1.
Outcome criterion5() {
  auto poles = two_poles();
  auto partition = mhlab::build_partition(poles);
  auto rule = mhlab::build_rule(poles, 3.0);

  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  // Lebesgue: the drift hypotheses are trivial with k1 = 0.
  {
    auto spec = lebesgue(poles);
    double c = hardy_constant(3, 0.0);
    mhlab::CheckOptions opts;
    opts.k0 = mhlab::compute_k0(partition, c);
    auto stats = run_family(spec, poles, c, mhlab::HardyMethod::ims, rule, opts);
    out.pass = out.pass && stats.all_hold && stats.members >= 8;
    detail << "lebesgue: " << stats.members << " members, worst margin+err "
           << fmt(stats.worst_margin_gap) << "; ";
  }

  // Graded weight: k1 audited from the mollified per-ball drift bound the
  // localized method actually consumes, over the default mollifier list.
  {
    auto spec = graded_weight(poles);
    auto balls = mhlab::make_ball_samples(poles, 2000, 53);
    std::vector<double> eps_list{1e-1, 1e-2, 1e-3};
    double k1 = mhlab::audit_k1_H2prime(spec, -1.0, eps_list, balls);
    spec.k1 = k1 + 1e-9 * (1.0 + std::abs(k1));
    double c = hardy_constant(3, spec.k2);
    mhlab::CheckOptions opts;
    opts.k0 = mhlab::compute_k0(partition, c);
    auto stats = run_family(spec, poles, c, mhlab::HardyMethod::ims, rule, opts);
    out.pass = out.pass && stats.all_hold && stats.members >= 8;
    detail << "gamma=0.5 delta=1: audited k1 " << fmt(k1) << ", c " << fmt(c)
           << ", worst margin+err " << fmt(stats.worst_margin_gap);
  }

  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 6. Vector-field inequalities, both forms, same family.
Outcome criterion6() {
  auto poles = two_poles();
  auto rule = mhlab::build_rule(poles, 3.0);
  int n = poles.count();
  int N = poles.dimension;

  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  auto run_both = [&](WeightSpec spec, const std::string& label,
                      bool audit_k1) {
    double c_o = hardy_constant(N, spec.k2);
    double c = 0.8 * c_o;
    // The drift-bound k1 enters each form at that form's own beta. It is
    // audited on the box minus the pole balls: with k2 = -gamma the bound
    // has no finite k1 inside the balls (the cross terms scale like 1/t),
    // which is recorded in the report region string.
    auto samples = mhlab::make_drift_samples(poles, 3.0, 20000, 61, poles.r0,
                                             /*graded_tail=*/false);
    for (auto method : {mhlab::HardyMethod::vector_field_cross,
                        mhlab::HardyMethod::vector_field}) {
      WeightSpec local = spec;
      if (audit_k1) {
        double beta = method == mhlab::HardyMethod::vector_field_cross
                          ? mhlab::beta_cross_max(n, N, spec.k2)
                          : mhlab::vector_field_constants(
                                n, c, poles.r0, c_o / c - 1.0, 0.0, N, spec.k2)
                                .beta_minus;
        double k1 = mhlab::audit_k1_H2(local, beta, samples);
        local.k1 = k1 + 1e-9 * (1.0 + std::abs(k1));
      }
      auto stats =
          run_family(local, poles, c, method, rule, mhlab::CheckOptions{});
      out.pass = out.pass && stats.all_hold && stats.members >= 8;
      detail << label << "/" << mhlab::method_name(method) << ": worst "
             << fmt(stats.worst_margin_gap) << " (k1 " << fmt(local.k1)
             << "); ";
    }
  };

  run_both(lebesgue(poles), "lebesgue", false);
  run_both(graded_weight(poles), "graded", true);

  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 7. Spectral dichotomy across mesh refinement.
Outcome criterion7() {
  auto poles = two_poles();
  auto spec = lebesgue(poles);
  double c_o = hardy_constant(3, 0.0);
  MeshParams params;  // defaults: box 3, 8 panels, order 3, pole cells 14

  Outcome out;
  std::ostringstream detail;

  // Subcritical half: the lambda1 sequence must settle.
  bool sub_ok = true;
  {
    std::vector<double> lambdas;
    for (int level : {2, 4, 6, 8, 10, 12}) {
      params.grading_layers = level;
      auto forms = mhlab::assemble(spec, poles, 0.8 * c_o, params);
      auto res = mhlab::lambda1(forms);
      sub_ok = sub_ok && res.verdict == "converged";
      lambdas.push_back(res.lambda1);
    }
    double first_change = std::abs(lambdas[1] - lambdas[0]);
    double last_change =
        std::abs(lambdas[lambdas.size() - 1] - lambdas[lambdas.size() - 2]);
    sub_ok = sub_ok && last_change < 0.1 * first_change;
    detail << "0.8c_o: lambda " << fmt(lambdas.front()) << " -> "
           << fmt(lambdas.back()) << ", first change " << fmt(first_change)
           << ", last " << fmt(last_change)
           << (sub_ok ? " (stable)" : " (NOT stable)") << "; ";
  }

  // Supercritical half: the criterion asks the witness sweep down to
  // eps = 1e-4 and the lambda1 sequence to cross -100. At c = 1.2 c_o the
  // coupling nu = sqrt(c - c_o) ~ 0.224 puts the divergence onset near
  // eps ~ exp(-pi/nu) ~ 8e-7 and grading level ~20, so neither diagnostic
  // can reach -100 at the schedule below; the half is expected to fail and
  // the numbers are reported for the record.
  bool super_ok = true;
  {
    double c = 1.2 * c_o;
    mhlab::WitnessSpec ws;
    ws.pole_index = 0;
    ws.eta = mhlab::choose_eta(c, 3, 0.0);
    double min_quotient = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      ws.epsilon = eps;
      min_quotient =
          std::min(min_quotient, mhlab::witness_quotient(spec, poles, ws, c));
    }
    bool witness_crossed = min_quotient <= -100.0;

    double min_lambda = 1e300;
    bool conv = true;
    for (int level : {4, 6, 8, 10, 12}) {
      params.grading_layers = level;
      auto forms = mhlab::assemble(spec, poles, c, params);
      auto res = mhlab::lambda1(forms);
      conv = conv && res.verdict == "converged";
      min_lambda = std::min(min_lambda, res.lambda1);
    }
    bool lambda_crossed = conv && min_lambda <= -100.0;
    super_ok = witness_crossed && lambda_crossed;
    detail << "1.2c_o: witness min " << fmt(min_quotient)
           << " at eps 1e-4, lambda min " << fmt(min_lambda) << " at level 12"
           << (super_ok ? ""
                        : " (no -100 crossing: onset needs eps ~ 8e-7 and "
                          "grading ~ level 20+)");
  }

  out.pass = sub_ok && super_ok;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 8. Dirichlet cube oracle for the eigensolver.
Outcome criterion8() {
  auto poles = build_configuration({{0.0, 0.0, 0.0}}, 3, 0.05);
  auto spec = lebesgue(poles);
  MeshParams params;
  params.box_half_width = 1.0;
  params.panels_per_axis = 32;
  params.grading_layers = 0;
  params.pole_cell_levels = 6;
  auto forms = mhlab::assemble(spec, poles, 0.0, params);
  auto res = mhlab::lambda1(forms);

  const double exact = 3.0 * (std::numbers::pi / 2.0) * (std::numbers::pi / 2.0);
  double rel = std::abs(res.lambda1 - exact) / exact;
  Outcome out;
  out.pass = res.verdict == "converged" && rel <= 0.02;
  out.detail = "lambda1 " + fmt(res.lambda1) + " vs 3(pi/2)^2 = " + fmt(exact) +
               ", rel err " + fmt(rel) + ", " + std::to_string(forms.dof_count()) +
               " dofs";
  return out;
}

// ---------------------------------------------------------------------------
// 9. Evolution dichotomy and the heat-decay oracle.
Outcome criterion9() {
  auto poles = two_poles();
  auto spec = lebesgue(poles);
  double c_o = hardy_constant(3, 0.0);

  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  // Subcritical: growth rates settle across grading levels.
  {
    auto rep = mhlab::blowup_indicator(spec, poles, 0.5 * c_o, {4, 6, 8},
                                       /*T=*/0.02, /*dt=*/1e-4);
    bool ok = rep.verdict == "existence-consistent";
    out.pass = out.pass && ok;
    detail << "0.5c_o: " << rep.verdict;
    if (!rep.omegas.empty())
      detail << " (omega " << fmt(rep.omegas.front()) << " -> "
             << fmt(rep.omegas.back()) << ")";
    detail << "; ";
  }

  // Supercritical: the discrete bottom eigenvalue scales like -4^level, so
  // at dt = 2e-3 the implicit step stays positive through level 9 and
  // reverses orientation at level 11; breakdown past the coarsest level is
  // the nonexistence signal.
  {
    auto rep = mhlab::blowup_indicator(spec, poles, 2.0 * c_o, {7, 9, 11},
                                       /*T=*/0.05, /*dt=*/2e-3);
    bool ok = rep.verdict == "nonexistence-consistent";
    out.pass = out.pass && ok;
    detail << "2c_o: " << rep.verdict;
    if (rep.breakdown_level >= 0)
      detail << " (breakdown at level " << rep.breakdown_level << ")";
    detail << "; ";
  }

  // c = 0 oracle: the decay rate of the discrete heat semigroup must match
  // the discrete lambda1 on the same mesh within 2%.
  {
    MeshParams params;
    params.grading_layers = 4;
    auto forms = mhlab::assemble(spec, poles, 0.0, params);
    auto eig = mhlab::lambda1(forms);
    Eigen::VectorXd v = eig.eigenvector;
    if (v.sum() < 0.0) v = -v;
    Eigen::VectorXd u0 = v.cwiseMax(0.0);
    auto run = mhlab::evolve(forms, u0, /*T=*/1.0, /*dt=*/4e-3);
    auto fit = mhlab::fit_exponential_bound(run.trace);
    double rel = std::abs(fit.omega + eig.lambda1) / std::abs(eig.lambda1);
    bool ok = eig.verdict == "converged" && !run.trace.breakdown &&
              fit.bounded && rel <= 0.02;
    out.pass = out.pass && ok;
    detail << "c=0: omega " << fmt(fit.omega) << " vs -lambda1 "
           << fmt(-eig.lambda1) << ", rel err " << fmt(rel);
  }

  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------------------
// 10. Integrability audits near a pole.
Outcome criterion10() {
  std::vector<double> radii;
  // The divergence rule resolves exponents to ~0.85/ln(1/r_min); depth 16
  // brings that inside the +-0.1 gate.
  for (int k = 1; k <= 16; ++k) radii.push_back(std::pow(0.5, k));
  std::vector<double> deltas;
  for (int k = 2; k <= 10; ++k) deltas.push_back(std::pow(0.5, k));

  auto single = [](int dim, double gamma, double delta, double m) {
    WeightSpec spec;
    spec.gamma = gamma;
    spec.delta = delta;
    spec.m = m;
    spec.k2 = -gamma;
    spec.poles =
        build_configuration({std::vector<double>(dim, 0.0)}, dim, 1.0);
    return spec;
  };

  Outcome out;
  out.pass = true;
  std::ostringstream detail;

  struct ExpCase {
    int N;
    double gamma, delta, m, expected;
  };
  for (auto ec : {ExpCase{3, 0.0, 0.0, 2.0, 3.0}, ExpCase{4, 1.0, 0.0, 2.0, 3.0},
                  ExpCase{3, -1.0, 1.0, 2.0, 4.0}}) {
    auto spec = single(ec.N, ec.gamma, ec.delta, ec.m);
    double est = mhlab::estimate_critical_exponent(spec, 0, radii);
    bool ok = std::abs(est - ec.expected) <= 0.1;
    out.pass = out.pass && ok;
    detail << "N=" << ec.N << " gamma=" << fmt(ec.gamma) << ": exponent "
           << fmt(est) << " vs " << fmt(ec.expected) << (ok ? "" : " (!)")
           << "; ";
  }

  struct DensCase {
    double gamma;
    int N;
    double p;
    const char* expected;
  };
  for (auto dc : {DensCase{0.0, 3, 2.0, "satisfied"},
                  DensCase{1.0, 3, 2.0, "violated"},
                  DensCase{1.0, 4, 2.0, "satisfied"}}) {
    auto spec = single(dc.N, dc.gamma, 0.0, 2.0);
    auto rep = mhlab::check_density_condition(spec, dc.p, 0, deltas);
    bool ok = rep.verdict == dc.expected;
    out.pass = out.pass && ok;
    detail << "(" << fmt(dc.gamma) << "," << dc.N << "," << fmt(dc.p)
           << "): " << rep.verdict << (ok ? "" : " (!)") << "; ";
  }

  out.detail = detail.str();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int selector = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Entry {
    int number;
    double budget_s;  // 0 = no runtime budget
    std::function<Outcome()> run;
  };
  const std::vector<Entry> table = {
      {1, 10.0, criterion1},  {2, 5.0, criterion2},  {3, 60.0, criterion3},
      {4, 0.0, criterion4},   {5, 300.0, criterion5}, {6, 300.0, criterion6},
      {7, 600.0, criterion7}, {8, 30.0, criterion8},  {9, 600.0, criterion9},
      {10, 120.0, criterion10},
  };

  int failures = 0;
  for (const auto& entry : table) {
    if (selector != 0 && entry.number != selector) continue;
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (entry.budget_s > 0.0 && secs > entry.budget_s) {
      out.pass = false;
      out.detail += " [over budget " + fmt(entry.budget_s) + "s]";
    }
    std::printf("criterion %d: %s (%.1fs) %s\n", entry.number,
                out.pass ? "PASS" : "FAIL", secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
