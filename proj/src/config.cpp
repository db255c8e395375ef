#include "mhlab/config.hpp"

#include <fstream>
#include <sstream>

#include "mhlab/errors.hpp"
#include "mhlab/hardy.hpp"

namespace mhlab {
namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& path) {
  if (!j.is_number())
    throw config_error("config field " + path + ": expected number");
  return j.get<double>();
}

long require_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw config_error("config field " + path + ": expected integer");
  return j.get<long>();
}

bool require_bool(const json& j, const std::string& path) {
  if (!j.is_boolean())
    throw config_error("config field " + path + ": expected boolean");
  return j.get<bool>();
}

std::string require_string(const json& j, const std::string& path) {
  if (!j.is_string())
    throw config_error("config field " + path + ": expected string");
  return j.get<std::string>();
}

std::vector<double> require_number_array(const json& j,
                                         const std::string& path) {
  if (!j.is_array())
    throw config_error("config field " + path + ": expected array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(require_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> require_int_array(const json& j, const std::string& path) {
  if (!j.is_array())
    throw config_error("config field " + path + ": expected array of integers");
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<int>(
        require_integer(j[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

std::vector<std::vector<double>> require_points(const json& j,
                                                const std::string& path) {
  if (!j.is_array())
    throw config_error("config field " + path + ": expected array of points");
  std::vector<std::vector<double>> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(
        require_number_array(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_weight(const json& obj, RunConfig& cfg) {
  if (!obj.is_object())
    throw config_error("config field weight: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "gamma")
      cfg.gamma = require_number(value, "weight.gamma");
    else if (key == "delta")
      cfg.delta = require_number(value, "weight.delta");
    else if (key == "m")
      cfg.m = require_number(value, "weight.m");
    else if (key == "k1")
      cfg.k1 = require_number(value, "weight.k1");
    else if (key == "k2")
      cfg.k2 = require_number(value, "weight.k2");
    else
      throw config_error("unknown config field: weight." + key);
  }
}

void parse_quadrature(const json& obj, RunConfig& cfg) {
  if (!obj.is_object())
    throw config_error("config field quadrature: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "panels_per_axis")
      cfg.quadrature.panels_per_axis =
          static_cast<int>(require_integer(value, "quadrature.panels_per_axis"));
    else if (key == "shells_per_pole")
      cfg.quadrature.shells_per_pole =
          static_cast<int>(require_integer(value, "quadrature.shells_per_pole"));
    else if (key == "r_min_ratio")
      cfg.quadrature.r_min_ratio = require_number(value, "quadrature.r_min_ratio");
    else if (key == "far_order")
      cfg.quadrature.far_order =
          static_cast<int>(require_integer(value, "quadrature.far_order"));
    else if (key == "ring_order")
      cfg.quadrature.ring_order =
          static_cast<int>(require_integer(value, "quadrature.ring_order"));
    else if (key == "near_order")
      cfg.quadrature.near_order =
          static_cast<int>(require_integer(value, "quadrature.near_order"));
    else
      throw config_error("unknown config field: quadrature." + key);
  }
}

void parse_mesh(const json& obj, RunConfig& cfg) {
  if (!obj.is_object()) throw config_error("config field mesh: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "panels_per_axis")
      cfg.mesh.panels_per_axis =
          static_cast<int>(require_integer(value, "mesh.panels_per_axis"));
    else if (key == "grading_layers")
      cfg.mesh.grading_layers =
          static_cast<int>(require_integer(value, "mesh.grading_layers"));
    else if (key == "cell_order")
      cfg.mesh.cell_order =
          static_cast<int>(require_integer(value, "mesh.cell_order"));
    else if (key == "pole_cell_levels")
      cfg.mesh.pole_cell_levels =
          static_cast<int>(require_integer(value, "mesh.pole_cell_levels"));
    else
      throw config_error("unknown config field: mesh." + key);
  }
}

void parse_samples(const json& obj, RunConfig& cfg) {
  if (!obj.is_object())
    throw config_error("config field samples: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "count")
      cfg.sample_count = require_integer(value, "samples.count");
    else if (key == "exclusion_radius")
      cfg.exclusion_radius = require_number(value, "samples.exclusion_radius");
    else if (key == "graded_tail")
      cfg.graded_tail = require_bool(value, "samples.graded_tail");
    else if (key == "per_ball")
      cfg.per_ball = require_integer(value, "samples.per_ball");
    else
      throw config_error("unknown config field: samples." + key);
  }
}

void parse_hypothesis(const json& obj, RunConfig& cfg) {
  if (!obj.is_object())
    throw config_error("config field hypothesis: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "alpha")
      cfg.alpha = require_number(value, "hypothesis.alpha");
    else if (key == "beta")
      cfg.beta = require_number(value, "hypothesis.beta");
    else if (key == "mollifier_eps")
      cfg.mollifier_eps = require_number_array(value, "hypothesis.mollifier_eps");
    else
      throw config_error("unknown config field: hypothesis." + key);
  }
}

void parse_evolution(const json& obj, RunConfig& cfg) {
  if (!obj.is_object())
    throw config_error("config field evolution: expected object");
  for (const auto& [key, value] : obj.items()) {
    if (key == "T")
      cfg.T = require_number(value, "evolution.T");
    else if (key == "dt")
      cfg.dt = require_number(value, "evolution.dt");
    else
      throw config_error("unknown config field: evolution." + key);
  }
}

}  // namespace

PoleConfiguration RunConfig::configuration() const {
  return build_configuration(poles, dimension, default_r0);
}

WeightSpec RunConfig::weight_spec() const {
  WeightSpec spec;
  spec.gamma = gamma;
  spec.delta = delta;
  spec.m = m;
  spec.k1 = k1;
  spec.k2 = k2;
  spec.poles = configuration();
  return spec;
}

double RunConfig::resolve_c() const {
  if (c >= 0.0) return c;
  return hardy_constant(dimension, k2);
}

double RunConfig::resolve_exclusion() const {
  if (exclusion_radius >= 0.0) return exclusion_radius;
  return configuration().r0;
}

MeshParams RunConfig::mesh_params() const {
  MeshParams p = mesh;
  p.box_half_width = box_half_width;
  return p;
}

RunConfig parse_config(const nlohmann::json& root) {
  if (!root.is_object())
    throw config_error("config root: expected object");
  RunConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "dimension")
      cfg.dimension = static_cast<int>(require_integer(value, "dimension"));
    else if (key == "poles")
      cfg.poles = require_points(value, "poles");
    else if (key == "r0")
      cfg.default_r0 = require_number(value, "r0");
    else if (key == "weight")
      parse_weight(value, cfg);
    else if (key == "c")
      cfg.c = require_number(value, "c");
    else if (key == "method")
      cfg.method = require_string(value, "method");
    else if (key == "box_half_width")
      cfg.box_half_width = require_number(value, "box_half_width");
    else if (key == "quadrature")
      parse_quadrature(value, cfg);
    else if (key == "mesh")
      parse_mesh(value, cfg);
    else if (key == "samples")
      parse_samples(value, cfg);
    else if (key == "hypothesis")
      parse_hypothesis(value, cfg);
    else if (key == "eps_list")
      cfg.eps_list = require_number_array(value, "eps_list");
    else if (key == "mesh_levels")
      cfg.mesh_levels = require_int_array(value, "mesh_levels");
    else if (key == "threshold")
      cfg.threshold = require_number(value, "threshold");
    else if (key == "evolution")
      parse_evolution(value, cfg);
    else if (key == "rho")
      cfg.rho = require_number(value, "rho");
    else if (key == "seed") {
      long s = require_integer(value, "seed");
      if (s < 0) throw config_error("config field seed: must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "k0")
      cfg.k0 = require_number(value, "k0");
    else
      throw config_error("unknown config field: " + key);
  }
  // Eager structural validation so every subcommand rejects bad configs the
  // same way, with the field name in the message.
  cfg.configuration();
  validate_weight_spec(cfg.weight_spec());
  parse_method(cfg.method);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config file not readable: " + path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file " + path + ": " + e.what());
  }
  return parse_config(root);
}

void apply_override(nlohmann::json& root, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw config_error("override must look like key=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);

  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // unquoted strings (e.g. method=ims)
  }

  nlohmann::json* node = &root;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    std::string part = path.substr(start, dot - start);
    if (part.empty())
      throw config_error("override path has an empty segment: " + path);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (!node->is_object() && !node->is_null())
      throw config_error("override path crosses a non-object: " + path);
    start = dot + 1;
  }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["dimension"] = cfg.dimension;
  j["poles"] = cfg.poles;
  j["r0"] = cfg.default_r0;
  j["weight"] = {{"gamma", cfg.gamma},
                 {"delta", cfg.delta},
                 {"m", cfg.m},
                 {"k1", cfg.k1},
                 {"k2", cfg.k2}};
  j["c"] = cfg.c;
  j["method"] = cfg.method;
  j["box_half_width"] = cfg.box_half_width;
  j["quadrature"] = {{"panels_per_axis", cfg.quadrature.panels_per_axis},
                     {"shells_per_pole", cfg.quadrature.shells_per_pole},
                     {"r_min_ratio", cfg.quadrature.r_min_ratio},
                     {"far_order", cfg.quadrature.far_order},
                     {"ring_order", cfg.quadrature.ring_order},
                     {"near_order", cfg.quadrature.near_order}};
  j["mesh"] = {{"panels_per_axis", cfg.mesh.panels_per_axis},
               {"grading_layers", cfg.mesh.grading_layers},
               {"cell_order", cfg.mesh.cell_order},
               {"pole_cell_levels", cfg.mesh.pole_cell_levels}};
  j["samples"] = {{"count", cfg.sample_count},
                  {"exclusion_radius", cfg.exclusion_radius},
                  {"graded_tail", cfg.graded_tail},
                  {"per_ball", cfg.per_ball}};
  j["hypothesis"] = {{"alpha", cfg.alpha},
                     {"beta", cfg.beta},
                     {"mollifier_eps", cfg.mollifier_eps}};
  j["eps_list"] = cfg.eps_list;
  j["mesh_levels"] = cfg.mesh_levels;
  j["threshold"] = cfg.threshold;
  j["evolution"] = {{"T", cfg.T}, {"dt", cfg.dt}};
  j["rho"] = cfg.rho;
  j["seed"] = cfg.seed;
  if (cfg.k0) j["k0"] = *cfg.k0;
  return j;
}

}  // namespace mhlab
