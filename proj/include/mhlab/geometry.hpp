#pragma once

#include <span>
#include <vector>

namespace mhlab {

// A set of singular points ("poles") in R^N together with the separation
// radius r0. The balls B(a_i, r0) are pairwise disjoint up to boundary
// contact; every localization argument in the library happens inside them.
struct PoleConfiguration {
  int dimension = 3;
  std::vector<std::vector<double>> poles;
  // r0 = min pairwise distance / 2 for n >= 2; the caller-supplied default
  // for a single pole (there is no pairwise distance to halve).
  double r0 = 1.0;

  int count() const { return static_cast<int>(poles.size()); }
};

double distance(std::span<const double> a, std::span<const double> b);
double distance_sq(std::span<const double> a, std::span<const double> b);

// Validates the point set, computes r0, rejects duplicates ("coincident
// poles") and N < 3 ("dimension below 3").
PoleConfiguration build_configuration(std::vector<std::vector<double>> points,
                                      int dimension, double default_r0 = 1.0);

// Squared distance from x to pole i.
double pole_distance_sq(const PoleConfiguration& config,
                        std::span<const double> x, int pole_index);

// Index of the nearest pole and its distance.
struct NearestPole {
  int index;
  double dist;
};
NearestPole nearest_pole(const PoleConfiguration& config,
                         std::span<const double> x);

}  // namespace mhlab
