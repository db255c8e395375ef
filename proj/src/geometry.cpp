#include "mhlab/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mhlab/errors.hpp"

namespace mhlab {

double distance_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(distance_sq(a, b));
}

PoleConfiguration build_configuration(std::vector<std::vector<double>> points,
                                      int dimension, double default_r0) {
  if (dimension < 3) throw config_error("dimension below 3");
  if (points.empty()) throw config_error("pole list is empty");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dimension)
      throw config_error("pole has " + std::to_string(p.size()) +
                         " coordinates, expected " +
                         std::to_string(dimension));
  }

  PoleConfiguration config;
  config.dimension = dimension;
  config.poles = std::move(points);

  if (config.count() == 1) {
    if (!(default_r0 > 0.0))
      throw config_error("single pole requires a positive default r0");
    config.r0 = default_r0;
    return config;
  }

  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.count(); ++i) {
    for (int j = i + 1; j < config.count(); ++j) {
      double d = distance(config.poles[i], config.poles[j]);
      if (d == 0.0) throw config_error("coincident poles");
      min_dist = std::min(min_dist, d);
    }
  }
  config.r0 = min_dist / 2.0;
  return config;
}

double pole_distance_sq(const PoleConfiguration& config,
                        std::span<const double> x, int pole_index) {
  return distance_sq(x, config.poles[pole_index]);
}

NearestPole nearest_pole(const PoleConfiguration& config,
                         std::span<const double> x) {
  NearestPole best{0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < config.count(); ++i) {
    double d = distance(x, config.poles[i]);
    if (d < best.dist) best = {i, d};
  }
  return best;
}

}  // namespace mhlab
