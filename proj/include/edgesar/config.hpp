#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "edgesar/dictionary.hpp"
#include "edgesar/forward_model.hpp"
#include "edgesar/geometry.hpp"
#include "edgesar/solver.hpp"

namespace edgesar {

struct GridConfig {
  double extent_x = 0.5;
  double extent_y = 0.5;
  std::size_t n_x = 16;
  std::size_t n_y = 16;
};

struct TrajectoryConfig {
  enum class Type { Circular, Linear };
  Type type = Type::Circular;
  double ground_range = 100.0;  // m, circular
  double altitude = 30.0;       // m, circular
  double start_angle_deg = 0.0;
  double extent_deg = 360.0;
  Vec3 start{100.0, -50.0, 30.0};  // linear
  Vec3 end{100.0, 50.0, 30.0};
  std::size_t pulses = 32;
  double far_field_ratio = 10.0;
};

struct FrequencyConfig {
  double center_hz = 0.78e9;
  double bandwidth_hz = 0.8e9;
  std::size_t samples = 32;
};

struct NoiseConfig {
  std::optional<double> snr_db;
  std::optional<double> sigma2;
  bool enabled() const { return snr_db.has_value() || sigma2.has_value(); }
};

/// Everything one experiment needs. Loaded from a JSON document whose fields
/// are addressed by dotted paths (e.g. "solver.lambda") in errors and
/// overrides. See README for the schema.
struct ExperimentConfig {
  GridConfig grid;
  SceneDescriptor scene;
  TrajectoryConfig trajectory;
  FrequencyConfig frequency;
  double edge_order = 2.0;
  DictionaryOptions dictionary;
  SolverConfig solver;
  NoiseConfig noise;
  SimulationMode simulation = SimulationMode::FarField;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::size_t checkpoint_every = 0;
  bool deterministic = true;

  ImagingGrid make_grid() const;
  PlatformTrajectory make_trajectory() const;
  FrequencyGrid make_frequencies() const;
};

/// Parses and validates; unknown keys and bad values raise ConfigError
/// naming the field path.
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json load_config_json(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies "a.b.c=value" to the document. The value is parsed as JSON when
/// possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace edgesar
