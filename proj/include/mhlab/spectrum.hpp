#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "mhlab/geometry.hpp"
#include "mhlab/partition.hpp"
#include "mhlab/quadrature.hpp"
#include "mhlab/weights.hpp"

namespace mhlab {

// Tensor mesh controls. Per axis the mesh is a uniform base grid plus
// geometrically graded planes a_d +- r0 2^{-j}, j = 0..grading_layers, around
// every pole coordinate; base nodes falling inside a quarter of the finest
// offset are dropped so each pole stays strictly cell-interior.
struct MeshParams {
  double box_half_width = 3.0;
  int panels_per_axis = 8;
  int grading_layers = 6;
  int cell_order = 3;        // tensor Gauss order per regular cell
  int pole_cell_levels = 14;  // dyadic grading depth inside a pole cell
};

// Multilinear nodal discretization of the quadratic form on the box with
// zero boundary values. S is the weighted stiffness form, P the multipolar
// potential form, M the lumped (row-sum) mass; A(c) = S - c P.
class DiscreteForms {
 public:
  using Sparse = Eigen::SparseMatrix<double>;

  const Sparse& stiffness() const { return S_; }
  const Sparse& potential() const { return P_; }
  const Eigen::VectorXd& mass() const { return M_; }
  Sparse system(double c) const { return S_ - c * P_; }
  Sparse system() const { return system(c_); }
  double c() const { return c_; }

  long dof_count() const { return M_.size(); }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  // Coordinates of one degree of freedom.
  std::vector<double> dof_point(long dof) const;
  // Dofs whose coordinates lie in [lo, hi] componentwise.
  std::vector<long> dofs_in_box(std::span<const double> lo,
                                std::span<const double> hi) const;
  // Nodal interpolation of a continuous function into the dof vector.
  Eigen::VectorXd interpolate(
      const std::function<double(std::span<const double>)>& f) const;

  const PoleConfiguration& config() const { return config_; }
  const WeightSpec& weight() const { return spec_; }
  const MeshParams& params() const { return params_; }
  int mesh_level() const { return params_.grading_layers; }

  friend DiscreteForms assemble(const WeightSpec& spec,
                                const PoleConfiguration& config, double c,
                                const MeshParams& params);

 private:
  Sparse S_, P_;
  Eigen::VectorXd M_;
  double c_ = 0.0;
  std::vector<std::vector<double>> axes_;
  std::vector<long> node_of_dof_;
  std::vector<long> dims_;  // nodes per axis
  PoleConfiguration config_;
  WeightSpec spec_;
  MeshParams params_;
};

DiscreteForms assemble(const WeightSpec& spec, const PoleConfiguration& config,
                       double c, const MeshParams& params);

struct SpectrumResult {
  double lambda1 = 0.0;
  Eigen::VectorXd eigenvector;
  int iterations = 0;
  double residual = 0.0;  // ||A v - lambda M v|| / ||M v||
  int mesh_level = 0;
  std::string verdict;  // converged | inconclusive
};

// Smallest generalized eigenvalue of (A(c), M) by shift-and-invert inverse
// iteration with a deterministic all-ones start, shift kept just below the
// running Rayleigh quotient.
SpectrumResult lambda1(const DiscreteForms& forms, double tol = 1e-8,
                       int max_iter = 200);

// Supercritical witness phi_eps(x) = (eps + |x-a_i|)^eta theta(|x-a_i|),
// theta = 1 on B(a_i, 1), a quintic ramp down on 1 <= t <= 2, 0 beyond.
struct WitnessSpec {
  int pole_index = 0;
  double eta = 0.0;
  double epsilon = 0.1;
};

// Midpoint of (max{-sqrt(c), -(N+k2)/2}, min{-(N+k2-2)/2, 0}); the interval
// is nonempty exactly when c > c_o(N+k2).
double choose_eta(double c, int N, double k2);

TestFunction make_witness(const PoleConfiguration& config,
                          const WitnessSpec& witness);

// Rayleigh quotient (int |grad phi|^2 dmu - c int V_n phi^2 dmu)/int phi^2
// dmu of the witness. The rule-based form integrates over the full box; the
// rule-free overload uses a radial ball rule over the witness support
// (graded below epsilon), which is much cheaper for deep epsilon sweeps.
double witness_quotient(const WeightSpec& spec, const PoleConfiguration& config,
                        const WitnessSpec& witness, double c,
                        const QuadratureRule& rule);
double witness_quotient(const WeightSpec& spec, const PoleConfiguration& config,
                        const WitnessSpec& witness, double c);

struct OptimalityReport {
  double c = 0.0;
  double c_o = 0.0;
  double eta = 0.0;
  double threshold = -100.0;
  std::vector<double> eps_list;
  std::vector<double> quotients;
  std::vector<int> mesh_levels;
  std::vector<double> lambda_values;
  bool witness_diverged = false;
  bool lambda_diverged = false;
  std::string verdict;  // "optimality confirmed" | "optimality not confirmed"
  bool conditional_on_h3 = false;  // set for user-callback weights
};

// Witness sweep over eps_list plus lambda1 over grading levels; confirmed
// when both diagnostics drop below the divergence threshold.
OptimalityReport optimality_sweep(const WeightSpec& spec,
                                  const PoleConfiguration& config, double c,
                                  const std::vector<double>& eps_list,
                                  const std::vector<int>& mesh_levels,
                                  double threshold = -100.0,
                                  const MeshParams& base_params = {});

}  // namespace mhlab
