#include "edgesar/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "edgesar/errors.hpp"

namespace edgesar {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError((path.empty() ? std::string("config") : path) + ": " + msg);
}

// Typed, path-aware view of one JSON object.
class Section {
 public:
  Section(const json& obj, std::string path, std::initializer_list<const char*> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!keys.count(it.key())) fail(join(path_, it.key()), "unknown key");
    }
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
  std::string path(const char* key) const { return join(path_, key); }
  const json& raw(const char* key) const { return obj_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path(key), "expected a finite number");
    return d;
  }
  std::optional<double> optional_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    return number(key, 0.0);
  }
  double positive(const char* key, double fallback) const {
    const double d = number(key, fallback);
    if (!(d > 0.0)) fail(path(key), "must be positive");
    return d;
  }
  std::size_t count(const char* key, std::size_t fallback, std::size_t min = 1) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path(key), "expected an integer");
    const auto n = v.get<long long>();
    if (n < static_cast<long long>(min)) {
      fail(path(key), "must be at least " + std::to_string(min));
    }
    return static_cast<std::size_t>(n);
  }
  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_boolean()) fail(path(key), "expected true or false");
    return obj_.at(key).get<bool>();
  }
  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    if (!obj_.at(key).is_string()) fail(path(key), "expected a string");
    return obj_.at(key).get<std::string>();
  }
  template <std::size_t N>
  Eigen::Matrix<double, N, 1> vec(const char* key, const Eigen::Matrix<double, N, 1>& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.size() != N) {
      fail(path(key), "expected an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (std::size_t i = 0; i < N; ++i) {
      if (!v[i].is_number()) fail(path(key) + "[" + std::to_string(i) + "]", "expected a number");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }
  Section child(const char* key, std::initializer_list<const char*> allowed) const {
    static const json kEmpty = json::object();
    return Section(has(key) ? obj_.at(key) : kEmpty, path(key), allowed);
  }

 private:
  const json& obj_;
  std::string path_;
};

ScenePrimitive parse_primitive(const json& item, const std::string& path) {
  if (!item.is_object() || !item.contains("type") || !item.at("type").is_string()) {
    fail(path, "primitive needs a string \"type\"");
  }
  const std::string type = item.at("type").get<std::string>();
  if (type == "rect") {
    Section s(item, path, {"type", "center", "half_size", "amplitude"});
    RectPrimitive r;
    r.center = s.vec<2>("center", Vec2::Zero());
    if (!s.has("half_size")) fail(s.path("half_size"), "required");
    r.half_size = s.vec<2>("half_size", Vec2::Zero());
    if (r.half_size.minCoeff() < 0.0) fail(s.path("half_size"), "must be non-negative");
    r.amplitude = s.number("amplitude", 1.0);
    return r;
  }
  if (type == "disc") {
    Section s(item, path, {"type", "center", "radius", "amplitude", "edge_width"});
    DiscPrimitive d;
    d.center = s.vec<2>("center", Vec2::Zero());
    if (!s.has("radius")) fail(s.path("radius"), "required");
    d.radius = s.positive("radius", 0.0);
    d.amplitude = s.number("amplitude", 1.0);
    d.edge_width = s.number("edge_width", 0.0);
    if (d.edge_width < 0.0) fail(s.path("edge_width"), "must be non-negative");
    return d;
  }
  if (type == "point") {
    Section s(item, path, {"type", "position", "amplitude"});
    PointPrimitive p;
    p.position = s.vec<2>("position", Vec2::Zero());
    p.amplitude = s.number("amplitude", 1.0);
    return p;
  }
  fail(join(path, "type"), "unknown primitive type \"" + type + "\"");
}

}  // namespace

ImagingGrid ExperimentConfig::make_grid() const {
  return ImagingGrid(grid.extent_x, grid.extent_y, grid.n_x, grid.n_y);
}

PlatformTrajectory ExperimentConfig::make_trajectory() const {
  const double diameter = make_grid().diameter();
  if (trajectory.type == TrajectoryConfig::Type::Linear) {
    return PlatformTrajectory::linear(trajectory.start, trajectory.end, trajectory.pulses,
                                      diameter, trajectory.far_field_ratio);
  }
  return PlatformTrajectory::circular(trajectory.ground_range, trajectory.altitude,
                                      trajectory.start_angle_deg * kPi / 180.0,
                                      trajectory.extent_deg * kPi / 180.0, trajectory.pulses,
                                      diameter, trajectory.far_field_ratio);
}

FrequencyGrid ExperimentConfig::make_frequencies() const {
  return FrequencyGrid::from_band(frequency.center_hz, frequency.bandwidth_hz, frequency.samples);
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig cfg;
  Section root(doc, "",
               {"grid", "scene", "trajectory", "frequency", "edge", "dictionary", "solver", "noise",
                "simulation", "seed", "output_dir", "checkpoint_every", "deterministic"});

  const Section grid = root.child("grid", {"extent_x", "extent_y", "n_x", "n_y"});
  cfg.grid.extent_x = grid.positive("extent_x", cfg.grid.extent_x);
  cfg.grid.extent_y = grid.positive("extent_y", cfg.grid.extent_y);
  cfg.grid.n_x = grid.count("n_x", cfg.grid.n_x);
  cfg.grid.n_y = grid.count("n_y", cfg.grid.n_y);

  const Section scene = root.child("scene", {"primitives"});
  if (scene.has("primitives")) {
    const json& prims = scene.raw("primitives");
    if (!prims.is_array()) fail(scene.path("primitives"), "expected an array");
    for (std::size_t k = 0; k < prims.size(); ++k) {
      cfg.scene.primitives.push_back(
          parse_primitive(prims[k], scene.path("primitives") + "[" + std::to_string(k) + "]"));
    }
  }

  const Section traj = root.child("trajectory", {"type", "ground_range", "altitude",
                                                 "start_angle_deg", "extent_deg", "start", "end",
                                                 "pulses", "far_field_ratio"});
  const std::string ttype = traj.text("type", "circular");
  if (ttype == "circular") {
    cfg.trajectory.type = TrajectoryConfig::Type::Circular;
  } else if (ttype == "linear") {
    cfg.trajectory.type = TrajectoryConfig::Type::Linear;
  } else {
    fail(traj.path("type"), "expected \"circular\" or \"linear\"");
  }
  cfg.trajectory.ground_range = traj.number("ground_range", cfg.trajectory.ground_range);
  cfg.trajectory.altitude = traj.number("altitude", cfg.trajectory.altitude);
  cfg.trajectory.start_angle_deg = traj.number("start_angle_deg", cfg.trajectory.start_angle_deg);
  cfg.trajectory.extent_deg = traj.number("extent_deg", cfg.trajectory.extent_deg);
  cfg.trajectory.start = traj.vec<3>("start", cfg.trajectory.start);
  cfg.trajectory.end = traj.vec<3>("end", cfg.trajectory.end);
  cfg.trajectory.pulses = traj.count("pulses", cfg.trajectory.pulses);
  cfg.trajectory.far_field_ratio = traj.positive("far_field_ratio", cfg.trajectory.far_field_ratio);

  const Section freq = root.child("frequency", {"center_hz", "bandwidth_hz", "samples"});
  cfg.frequency.center_hz = freq.positive("center_hz", cfg.frequency.center_hz);
  cfg.frequency.bandwidth_hz = freq.number("bandwidth_hz", cfg.frequency.bandwidth_hz);
  if (cfg.frequency.bandwidth_hz < 0.0) fail(freq.path("bandwidth_hz"), "must be non-negative");
  if (cfg.frequency.bandwidth_hz >= 2.0 * cfg.frequency.center_hz) {
    fail(freq.path("bandwidth_hz"), "band must stay above 0 Hz");
  }
  cfg.frequency.samples = freq.count("samples", cfg.frequency.samples);

  const Section edge = root.child("edge", {"p"});
  cfg.edge_order = edge.number("p", cfg.edge_order);
  if (!(cfg.edge_order >= 1.0)) fail(edge.path("p"), "must be >= 1");

  const Section dict = root.child("dictionary", {"orientations", "scales", "stride", "length_px",
                                                 "thickness_px"});
  cfg.dictionary.n_orientations = dict.count("orientations", cfg.dictionary.n_orientations);
  cfg.dictionary.n_scales = dict.count("scales", cfg.dictionary.n_scales);
  cfg.dictionary.stride = dict.count("stride", cfg.dictionary.stride);
  cfg.dictionary.base_length_px = dict.positive("length_px", cfg.dictionary.base_length_px);
  cfg.dictionary.thickness_px = dict.positive("thickness_px", cfg.dictionary.thickness_px);

  const Section solver = root.child("solver", {"lambda", "lambda_rel", "max_iters", "rel_tol",
                                               "lipschitz", "power_iters", "warm_start",
                                               "adaptive_restart", "domain"});
  if (solver.has("lambda")) cfg.solver.lambda = solver.positive("lambda", 1.0);
  cfg.solver.lambda_rel = solver.positive("lambda_rel", cfg.solver.lambda_rel);
  cfg.solver.max_iters = solver.count("max_iters", cfg.solver.max_iters);
  cfg.solver.rel_tol = solver.positive("rel_tol", cfg.solver.rel_tol);
  const std::string lip = solver.text("lipschitz", "exact");
  if (lip == "exact") {
    cfg.solver.lipschitz_mode = LipschitzMode::ExactSpectral;
  } else if (lip == "power") {
    cfg.solver.lipschitz_mode = LipschitzMode::PowerIteration;
  } else {
    fail(solver.path("lipschitz"), "expected \"exact\" or \"power\"");
  }
  cfg.solver.power_iters = solver.count("power_iters", cfg.solver.power_iters);
  cfg.solver.warm_start = solver.flag("warm_start", cfg.solver.warm_start);
  cfg.solver.adaptive_restart = solver.flag("adaptive_restart", cfg.solver.adaptive_restart);
  const std::string domain = solver.text("domain", "complex");
  if (domain == "complex") {
    cfg.solver.domain = CoefficientDomain::Complex;
  } else if (domain == "real") {
    cfg.solver.domain = CoefficientDomain::Real;
  } else {
    fail(solver.path("domain"), "expected \"complex\" or \"real\"");
  }

  const Section noise = root.child("noise", {"snr_db", "sigma2"});
  cfg.noise.snr_db = noise.optional_number("snr_db");
  if (noise.has("sigma2")) cfg.noise.sigma2 = noise.positive("sigma2", 1.0);
  if (cfg.noise.snr_db && cfg.noise.sigma2) fail(noise.path("sigma2"), "give snr_db or sigma2, not both");

  const std::string sim = root.text("simulation", "farfield");
  if (sim == "farfield") {
    cfg.simulation = SimulationMode::FarField;
  } else if (sim == "exact") {
    cfg.simulation = SimulationMode::Exact;
  } else {
    fail(root.path("simulation"), "expected \"farfield\" or \"exact\"");
  }
  cfg.seed = root.count("seed", cfg.seed, 0);
  cfg.output_dir = root.text("output_dir", cfg.output_dir.string());
  cfg.checkpoint_every = root.count("checkpoint_every", cfg.checkpoint_every, 0);
  cfg.deterministic = root.flag("deterministic", cfg.deterministic);

  // Cross-field checks surface with the section that owns them.
  try {
    const ImagingGrid g = cfg.make_grid();
    make_synthetic_scene(g, cfg.scene);
  } catch (const ConfigError& e) {
    fail("scene.primitives", e.what());
  } catch (const Error& e) {
    fail("grid", e.what());
  }
  try {
    cfg.make_trajectory();
  } catch (const Error& e) {
    fail("trajectory", e.what());
  }
  try {
    cfg.make_frequencies();
  } catch (const Error& e) {
    fail("frequency", e.what());
  }
  return cfg;
}

json load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(load_config_json(path));
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override \"" + assignment + "\" is not of the form key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("override key \"" + key + "\" has an empty component");
    if (!node->is_object()) {
      throw ConfigError("override key \"" + key + "\" descends into a non-object");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
  *node = std::move(value);
}

}  // namespace edgesar
