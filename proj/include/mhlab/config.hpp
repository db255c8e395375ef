#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mhlab/geometry.hpp"
#include "mhlab/quadrature.hpp"
#include "mhlab/spectrum.hpp"
#include "mhlab/weights.hpp"

namespace mhlab {

// One flat bag of knobs shared by every subcommand. Parsing is strict:
// unknown fields and type mismatches are rejected with the offending path.
struct RunConfig {
  int dimension = 3;
  std::vector<std::vector<double>> poles{{-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  double default_r0 = 1.0;  // only used when a single pole leaves r0 open

  double gamma = 0.0;
  double delta = 0.0;
  double m = 2.0;
  double k1 = 0.0;
  double k2 = 0.0;

  double c = -1.0;  // negative -> c_o(N + k2)
  std::string method = "ims";
  double box_half_width = 3.0;

  QuadratureOptions quadrature;
  MeshParams mesh;

  long sample_count = 20000;
  double exclusion_radius = -1.0;  // negative -> r0
  bool graded_tail = true;
  long per_ball = 2000;

  double alpha = -1.0;
  double beta = 1.0;
  std::vector<double> mollifier_eps{1e-1, 1e-2, 1e-3};

  std::vector<double> eps_list{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<int> mesh_levels{4, 6, 8};
  double threshold = -100.0;

  double T = 0.1;
  double dt = -1.0;  // negative -> 1e-3 T
  double rho = 0.1;

  std::uint64_t seed = 7261;
  std::optional<double> k0;

  PoleConfiguration configuration() const;
  WeightSpec weight_spec() const;
  double resolve_c() const;
  double resolve_exclusion() const;
  MeshParams mesh_params() const;  // mesh block with box_half_width applied
};

// Strict parse of a complete config document over the defaults.
RunConfig parse_config(const nlohmann::json& root);
RunConfig load_config(const std::string& path);

// Applies one "dotted.path=value" assignment onto a JSON document; the value
// is parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& root, const std::string& assignment);

// Full echo of a parsed config, defaults included, for reports.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace mhlab
