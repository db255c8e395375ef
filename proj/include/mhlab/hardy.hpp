#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhlab/geometry.hpp"
#include "mhlab/partition.hpp"
#include "mhlab/quadrature.hpp"
#include "mhlab/weights.hpp"

namespace mhlab {

// V_n(x) = sum_i 1/|x-a_i|^2.
double multipolar_potential(const PoleConfiguration& config,
                            std::span<const double> x);

// Residual of the algebraic cross-term identity (ordered pairs i != j):
//   sum (x-a_i).(x-a_j)/(t_i^2 t_j^2)
//     = (n-1) sum_i 1/t_i^2 - 1/2 sum |a_i-a_j|^2/(t_i^2 t_j^2).
double cross_term_residual(const PoleConfiguration& config,
                           std::span<const double> x);

// Ordered-pair cross potential sum |a_i-a_j|^2/(t_i^2 t_j^2); appears on the
// left side of the vector-field-cross inequality.
double cross_potential(const PoleConfiguration& config,
                       std::span<const double> x);

// c_o(N+k2) = ((N+k2-2)/2)^2.
double hardy_constant(int N, double k2);

// Maximizer of (N+k2-2) beta - n beta^2; the maximum value is c_o/n.
double beta_cross_max(int n, int N, double k2);

// Closed-form constants of the vector-field method at a given epsilon:
// beta_pm = (sqrt(c_o) +- sqrt(c_o - c(1+eps/2)))/(1+eps/2),
// K = beta_minus^2/r0^2 (n-1)(n-1+1/(2 eps)) + k1, c_max = c_o/(1+eps/2).
struct VectorFieldConstants {
  double K = 0.0;
  double beta_plus = 0.0;
  double beta_minus = 0.0;
  double c_max = 0.0;
  double epsilon = 0.0;
};
VectorFieldConstants vector_field_constants(int n, double c, double r0,
                                            double epsilon, double k1, int N,
                                            double k2);

// IMS remainder constant K = (k0 + (n+1)c)/r0^2 + k1.
double ims_remainder(int n, double c, double r0, double k0, double k1);

enum class HardyMethod { vector_field_cross, vector_field, ims };
std::string method_name(HardyMethod method);
HardyMethod parse_method(const std::string& name);

struct QuadraticForm {
  double grad_energy = 0.0;      // int |grad phi|^2 dmu
  double potential_energy = 0.0;  // c int V_n phi^2 dmu
  double mass = 0.0;              // int phi^2 dmu
  double Q = 0.0;                 // grad_energy - potential_energy
  double quadrature_error = 0.0;  // summed per-component estimates
};
QuadraticForm quadratic_form(const TestFunction& phi, const WeightSpec& spec,
                             const PoleConfiguration& config, double c,
                             const QuadratureRule& rule);

struct HardyReport {
  std::string method;
  double c = 0.0;
  double c_o = 0.0;
  double K = 0.0;
  double lhs = 0.0;  // weighted potential integral (+ cross term for the
                     // vector-field-cross method)
  double rhs = 0.0;  // gradient integral + K * mass
  double margin = 0.0;
  double quadrature_error = 0.0;
  std::string verdict;  // holds | violated_within_error | violated
  std::optional<double> k0;
  std::string test_function;
};

struct CheckOptions {
  // Reuse a precomputed k0 for the ims method (skips the maximization).
  std::optional<double> k0;
  // Evaluate the ims form at c > c_o instead of rejecting it; used to
  // exhibit violations with supercritical witnesses. Has no effect on the
  // vector-field methods, whose constants are undefined there.
  bool allow_supercritical = false;
};

// Evaluates one inequality instance:
//   vector-field-cross: (c_o/n) int V_n phi^2 + (beta^2/2) int X phi^2
//                         <= int |grad phi|^2 + k1 int phi^2,
//     beta = beta_cross_max; the c argument is ignored (the method fixes its
//     own coefficient) and the report records c_o/n.
//   vector-field: c int V_n phi^2 <= int |grad phi|^2 + K int phi^2 with
//     eps = c_o/c - 1 and K from vector_field_constants; requires 0 < c < c_o.
//   ims: same shape with K = ims_remainder using a computed (or supplied) k0;
//     requires 0 < c <= c_o unless allow_supercritical.
HardyReport check_inequality(const TestFunction& phi, const WeightSpec& spec,
                             const PoleConfiguration& config, double c,
                             HardyMethod method, const QuadratureRule& rule,
                             const CheckOptions& opts = {});

// Deterministic test-function family: per-pole radial bumps at three widths,
// a boundary-cut Gaussian bump at the pole centroid, and two seeded linear
// combinations. Supercritical witness members live in the spectrum module.
struct FamilyMember {
  std::string name;
  TestFunction fn;
};
std::vector<FamilyMember> regression_family(const PoleConfiguration& config,
                                            double box_half_width,
                                            std::uint64_t seed);

}  // namespace mhlab
