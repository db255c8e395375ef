#pragma once

#include <functional>
#include <optional>
#include <span>

#include "mhlab/geometry.hpp"
#include "mhlab/quadrature.hpp"
#include "mhlab/weights.hpp"

namespace mhlab {

// Radial cutoff profile: 1 on [0, 1/2], sin(pi t) on [1/2, 1], 0 beyond.
struct ProfileValue {
  double value = 0.0;
  double derivative = 0.0;
};
ProfileValue eval_profile(double t);

// The IMS partition of unity: J_i(x) = J(|x-a_i|/r0) for i < n, and
// J_n = sqrt(1 - sum J_i^2). Ball supports are pairwise disjoint up to
// boundary contact, so at most one pole term is active at any point; the
// outer member and its gradient are evaluated through that pole's profile
// directly, which avoids the cancellation in 1 - sin^2 near the inner kink.
// grad J_n is defined as 0 where some J_i = 1 (the constraint removes the
// support of the singularity).
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(PoleConfiguration config);

  const PoleConfiguration& config() const { return config_; }
  int member_count() const { return config_.count() + 1; }

  // values: size n+1 (pole members first, outer member last).
  void eval(std::span<const double> x, std::span<double> values) const;
  // gradients: flat (n+1) x N, row-major.
  void eval(std::span<const double> x, std::span<double> values,
            std::span<double> gradients) const;

  // Filled by callers that run compute_k0; not used internally.
  std::optional<double> k0;

 private:
  PoleConfiguration config_;
};

PartitionOfUnity build_partition(const PoleConfiguration& config);

// Max violations over a sample set. The property-d) ratio check skips
// samples with 1 - J_i^2 < 1e-4 (the denominator loses up to ~1e-12
// absolute there and the identity cannot be resolved at 1e-10).
struct PartitionCheck {
  double max_sum_residual = 0.0;      // |sum J_i^2 - 1|
  double max_orthogonality = 0.0;     // property a), max over coordinates
  double max_identity_d = 0.0;        // property d)
  double max_support_overlap = 0.0;   // J_i * J_j for i != j <= n
  long evaluated = 0;
  long skipped_near_kink = 0;
};
PartitionCheck verify_partition(const PartitionOfUnity& partition,
                                const SampleSet& samples);

// k0 = max(0, sup r0^2 [ sum_i |grad J_i|^2/(1-J_i^2) + c J_out^2 V_pair ]
//             - 2c)
// over the ball supports, where the sup is evaluated per pole against its
// nearest neighbour in the reduced (t, cos psi) coordinates (the expression
// is invariant under rigid motions), by low-discrepancy sampling plus
// shrinking-box refinement. For a single pole the pair potential degenerates
// to 1/t^2. At exact ball contact the sup tends to pi^2 + 2c at the contact
// point, a measure-zero set; the sampled value stays strictly below.
double compute_k0(const PartitionOfUnity& partition, double c);

// A scalar test function with analytic gradient.
struct TestFunction {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
};

// | int(|grad phi|^2 - V phi^2) dmu
//   - sum_i int(|grad(J_i phi)|^2 - V (J_i phi)^2) dmu
//   + int sum_i |grad J_i|^2 phi^2 dmu |
// The three integrals are accumulated separately in one node sweep; the
// identity holds pointwise, so the result is at quadrature rounding level.
double ims_decomposition_residual(const PartitionOfUnity& partition,
                                  const TestFunction& phi, const Integrand& V,
                                  const WeightSpec& spec,
                                  const QuadratureRule& rule);

}  // namespace mhlab
