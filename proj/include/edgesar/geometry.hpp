#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "edgesar/types.hpp"

namespace edgesar {

/// Origin-centred rectangular pixel grid. Pixel i = iy * n_x + ix (row-major)
/// has centre ((ix + 0.5) dx - extent_x, (iy + 0.5) dy - extent_y).
class ImagingGrid {
 public:
  ImagingGrid(double extent_x, double extent_y, std::size_t n_x, std::size_t n_y);

  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  std::size_t n_x() const { return n_x_; }
  std::size_t n_y() const { return n_y_; }
  std::size_t size() const { return n_x_ * n_y_; }
  double dx() const { return 2.0 * extent_x_ / static_cast<double>(n_x_); }
  double dy() const { return 2.0 * extent_y_ / static_cast<double>(n_y_); }
  double pixel_area() const { return dx() * dy(); }
  /// Length of the grid diagonal.
  double diameter() const;

  Vec2 pixel_center(std::size_t i) const;
  const std::vector<Vec2>& pixel_centers() const { return centers_; }
  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * n_x_ + ix; }
  bool contains(const Vec2& p) const;

  bool operator==(const ImagingGrid& o) const {
    return extent_x_ == o.extent_x_ && extent_y_ == o.extent_y_ && n_x_ == o.n_x_ &&
           n_y_ == o.n_y_;
  }

 private:
  double extent_x_;
  double extent_y_;
  std::size_t n_x_;
  std::size_t n_y_;
  std::vector<Vec2> centers_;
};

// Scene primitives. Coordinates are in metres.
struct RectPrimitive {
  Vec2 center{0.0, 0.0};
  Vec2 half_size{0.0, 0.0};
  double amplitude = 1.0;
};

/// Filled disc. edge_width > 0 replaces the hard boundary by the profile
/// 0.5 (1 - tanh((r - radius) / edge_width)).
struct DiscPrimitive {
  Vec2 center{0.0, 0.0};
  double radius = 0.0;
  double amplitude = 1.0;
  double edge_width = 0.0;
};

/// Paints the single pixel containing the position.
struct PointPrimitive {
  Vec2 position{0.0, 0.0};
  double amplitude = 1.0;
};

using ScenePrimitive = std::variant<RectPrimitive, DiscPrimitive, PointPrimitive>;

struct SceneDescriptor {
  std::vector<ScenePrimitive> primitives;
};

/// Reflectivity raster on a grid. Topography is identically zero, so a
/// scatterer at 2D position x sits at [x, 0] in 3D.
struct GroundScene {
  ImagingGrid grid;
  RealVector reflectivity;

  double topography(const Vec2&) const { return 0.0; }
  Vec3 position3d(std::size_t i) const;
};

/// Rasterizes primitives in order; later primitives overwrite earlier ones
/// wherever they are nonzero. Throws ConfigError naming the first primitive
/// that extends past the grid.
GroundScene make_synthetic_scene(const ImagingGrid& grid, const SceneDescriptor& desc);

class PlatformTrajectory {
 public:
  /// Rejects positions at zero range or closer than
  /// far_field_ratio * scene_diameter.
  PlatformTrajectory(std::vector<Vec3> positions, double scene_diameter,
                     double far_field_ratio = 10.0);

  /// Circular arc at horizontal radius `ground_range` and height `altitude`,
  /// `count` pulses from start_angle spanning extent (radians, endpoints
  /// included unless the arc closes on itself).
  static PlatformTrajectory circular(double ground_range, double altitude, double start_angle,
                                     double extent, std::size_t count, double scene_diameter,
                                     double far_field_ratio = 10.0);
  static PlatformTrajectory linear(const Vec3& start, const Vec3& end, std::size_t count,
                                   double scene_diameter, double far_field_ratio = 10.0);

  std::size_t size() const { return positions_.size(); }
  const Vec3& position(std::size_t n) const;
  const std::vector<Vec3>& positions() const { return positions_; }

 private:
  std::vector<Vec3> positions_;
};

class FrequencyGrid {
 public:
  /// Angular frequencies in rad/s, strictly increasing and positive.
  explicit FrequencyGrid(std::vector<double> omega);
  /// n samples uniformly covering [fc - bw/2, fc + bw/2] (Hz).
  static FrequencyGrid from_band(double center_hz, double bandwidth_hz, std::size_t n);

  std::size_t size() const { return omega_.size(); }
  double omega(std::size_t m) const { return omega_.at(m); }
  const std::vector<double>& omegas() const { return omega_; }
  double center() const { return 0.5 * (omega_.front() + omega_.back()); }
  double bandwidth() const { return omega_.back() - omega_.front(); }

 private:
  std::vector<double> omega_;
};

/// [γ1/‖γ‖, γ2/‖γ‖, 0]; the third component is exactly zero.
Vec3 unit_look_direction(const Vec3& position);
Vec3 unit_look_direction(const PlatformTrajectory& traj, std::size_t n);

/// Spatial frequency (2ω/c) times the horizontal look direction, in rad/m.
Vec2 xi_sample(double omega, const Vec3& position);
Vec2 xi_sample(double omega, const PlatformTrajectory& traj, std::size_t n);
std::vector<Vec2> xi_samples(const FrequencyGrid& freqs, const Vec3& position);

// Raster export: CSV has one grid row (fixed iy) per line. The binary form
// is u32 n_x, u32 n_y, then n_x*n_y little-endian f64 in row-major order.
void write_raster_csv(const std::filesystem::path& path, const ImagingGrid& grid,
                      const RealVector& values);
void write_raster_binary(const std::filesystem::path& path, const ImagingGrid& grid,
                         const RealVector& values);
struct Raster {
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  RealVector values;
};
Raster read_raster_binary(const std::filesystem::path& path);

}  // namespace edgesar
