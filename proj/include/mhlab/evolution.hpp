#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mhlab/spectrum.hpp"

namespace mhlab {

// Axis-aligned control box for positivity tracking.
struct ControlBox {
  std::vector<double> lo, hi;
  bool empty() const { return lo.empty(); }
};

// Centroid of the poles +- r0/4 per axis; when the centroid sits on a pole
// (single pole, collinear clusters) the box shifts to
// nearest_pole + 0.625 r0 e_0 with half-width r0/8, so it always keeps a
// distance of at least r0/2 from every pole.
ControlBox default_control_box(const PoleConfiguration& config);

// Product bump centered at the poles' centroid, positive on a box of
// per-axis half-width 0.9 (L - |centroid_d|), zero at the boundary. Strictly
// positive on the default control box.
Integrand default_initial_bump(const PoleConfiguration& config,
                               double box_half_width);

struct EvolutionTrace {
  std::vector<double> times;     // includes t = 0
  std::vector<double> norms;     // sqrt(u^T M u)
  std::vector<double> min_on_K;  // min over dofs inside the control box
  double dt = 0.0;
  int mesh_level = 0;
  // Linear solve failure, or a step that reverses M-orientation (the
  // implicit operator M + dt A stopped being positive definite). The trace
  // is truncated at the last completed step.
  bool breakdown = false;
  long steps_completed = 0;
};

struct EvolveOptions {
  ControlBox control;         // empty -> default_control_box
  bool record_states = false;
};

struct EvolutionResult {
  EvolutionTrace trace;
  std::vector<Eigen::VectorXd> states;  // per recorded time, if requested
};

// Implicit Euler for u_t = -A u in the M-weighted sense:
// (M + dt A) u_{k+1} = M u_k, A = S - c P from the forms. u0 must be
// nonnegative nodal data of matching size.
EvolutionResult evolve(const DiscreteForms& forms, const Eigen::VectorXd& u0,
                       double T, double dt, const EvolveOptions& opts = {});

struct BoundFit {
  double omega = 0.0;      // least-squares slope of log norms
  double prefactor = 1.0;  // smallest M >= 1 with |u(t)| <= M e^{w t} |u0|
  double residual = 0.0;   // max |log norm - fitted line|
  bool bounded = false;    // residual <= 0.1
  long samples_used = 0;
};
// Fits the recorded norms; an identically zero tail is excluded (the fit
// uses the longest strictly positive prefix).
BoundFit fit_exponential_bound(const EvolutionTrace& trace);

struct BlowupReport {
  std::vector<int> levels;
  std::vector<double> omegas;
  std::vector<double> residuals;
  int breakdown_level = -1;  // grading level where a step broke down
  std::string verdict;  // existence-consistent | nonexistence-consistent |
                        // inconclusive
  double T = 0.0;
  double dt = 0.0;
};

// Desk-scale dichotomy proxy: evolves the default bump across grading
// levels and compares growth rates. Rates that stabilize are consistent
// with existence; rates growing by >= 50% per level, or step breakdown
// beyond the coarsest level, are consistent with nonexistence.
BlowupReport blowup_indicator(const WeightSpec& spec,
                              const PoleConfiguration& config, double c,
                              const std::vector<int>& mesh_levels,
                              double T = 0.1, double dt = -1.0,
                              const MeshParams& base_params = {});

struct PositivityReport {
  std::string verdict;  // positive | positivity violated | zero initial data
  double min_ratio = 0.0;  // min_t min_K u(t) / int_K u0 dmu
  double worst_value = 0.0;
  double worst_time = 0.0;
  std::vector<double> worst_location;
  std::string detail;
};

// Checks min_K u(t) > 0 at every recorded time and reports the Harnack-type
// ratio against int_K u0 dmu. K must keep a distance of at least 1e-2 r0
// from every pole. Uses recorded states when present, otherwise the traced
// minima (no violation location in that case).
PositivityReport positivity_check(const DiscreteForms& forms,
                                  const EvolutionResult& run,
                                  const ControlBox& K,
                                  const Eigen::VectorXd& u0);

}  // namespace mhlab
