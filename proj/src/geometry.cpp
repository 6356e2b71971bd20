#include "edgesar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "edgesar/binary_io.hpp"
#include "edgesar/errors.hpp"

namespace edgesar {

ImagingGrid::ImagingGrid(double extent_x, double extent_y, std::size_t n_x, std::size_t n_y)
    : extent_x_(extent_x), extent_y_(extent_y), n_x_(n_x), n_y_(n_y) {
  if (!(extent_x > 0.0) || !(extent_y > 0.0) || !std::isfinite(extent_x) ||
      !std::isfinite(extent_y)) {
    throw ParameterError("grid extents must be positive and finite");
  }
  if (n_x == 0 || n_y == 0) throw ParameterError("grid sample counts must be at least 1");
  centers_.reserve(n_x * n_y);
  for (std::size_t iy = 0; iy < n_y; ++iy) {
    for (std::size_t ix = 0; ix < n_x; ++ix) {
      centers_.emplace_back((static_cast<double>(ix) + 0.5) * dx() - extent_x_,
                            (static_cast<double>(iy) + 0.5) * dy() - extent_y_);
    }
  }
}

double ImagingGrid::diameter() const { return 2.0 * std::hypot(extent_x_, extent_y_); }

Vec2 ImagingGrid::pixel_center(std::size_t i) const { return centers_.at(i); }

bool ImagingGrid::contains(const Vec2& p) const {
  return std::abs(p.x()) <= extent_x_ && std::abs(p.y()) <= extent_y_;
}

Vec3 GroundScene::position3d(std::size_t i) const {
  const Vec2 x = grid.pixel_center(i);
  return {x.x(), x.y(), topography(x)};
}

namespace {

// Coverage of pixel i by a primitive, in [0, 1].
struct Coverage {
  const ImagingGrid& grid;

  double operator()(const RectPrimitive& r, std::size_t i) const {
    const Vec2 d = (grid.pixel_center(i) - r.center).cwiseAbs();
    return (d.x() <= r.half_size.x() && d.y() <= r.half_size.y()) ? 1.0 : 0.0;
  }
  double operator()(const DiscPrimitive& c, std::size_t i) const {
    const double dist = (grid.pixel_center(i) - c.center).norm();
    if (c.edge_width > 0.0) return 0.5 * (1.0 - std::tanh((dist - c.radius) / c.edge_width));
    return dist <= c.radius ? 1.0 : 0.0;
  }
};

std::size_t pixel_of(const ImagingGrid& grid, const Vec2& p) {
  auto ix = static_cast<std::size_t>(std::floor((p.x() + grid.extent_x()) / grid.dx()));
  auto iy = static_cast<std::size_t>(std::floor((p.y() + grid.extent_y()) / grid.dy()));
  ix = std::min(ix, grid.n_x() - 1);
  iy = std::min(iy, grid.n_y() - 1);
  return grid.index(ix, iy);
}

bool inside(const ImagingGrid& grid, const ScenePrimitive& prim) {
  const double ex = grid.extent_x();
  const double ey = grid.extent_y();
  return std::visit(
      [&](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RectPrimitive>) {
          return p.half_size.minCoeff() >= 0.0 &&
                 std::abs(p.center.x()) + p.half_size.x() <= ex &&
                 std::abs(p.center.y()) + p.half_size.y() <= ey;
        } else if constexpr (std::is_same_v<T, DiscPrimitive>) {
          return p.radius >= 0.0 && p.edge_width >= 0.0 &&
                 std::abs(p.center.x()) + p.radius <= ex &&
                 std::abs(p.center.y()) + p.radius <= ey;
        } else {
          return grid.contains(p.position);
        }
      },
      prim);
}

const char* kind_name(const ScenePrimitive& prim) {
  switch (prim.index()) {
    case 0: return "rect";
    case 1: return "disc";
    default: return "point";
  }
}

}  // namespace

GroundScene make_synthetic_scene(const ImagingGrid& grid, const SceneDescriptor& desc) {
  RealVector rho = RealVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < desc.primitives.size(); ++k) {
    const ScenePrimitive& prim = desc.primitives[k];
    if (!inside(grid, prim)) {
      std::ostringstream msg;
      msg << "scene primitive " << k << " (" << kind_name(prim)
          << ") lies outside the grid extent";
      throw ConfigError(msg.str());
    }
    if (const auto* pt = std::get_if<PointPrimitive>(&prim)) {
      rho[static_cast<Eigen::Index>(pixel_of(grid, pt->position))] = pt->amplitude;
      continue;
    }
    const Coverage cover{grid};
    const double amp = std::visit(
        [](const auto& p) -> double { return p.amplitude; }, prim);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double w = std::visit(
          [&](const auto& p) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, PointPrimitive>) {
              return 0.0;
            } else {
              return cover(p, i);
            }
          },
          prim);
      if (w == 1.0) {
        rho[static_cast<Eigen::Index>(i)] = amp;
      } else if (w > 0.0) {
        auto& v = rho[static_cast<Eigen::Index>(i)];
        v = (1.0 - w) * v + w * amp;
      }
    }
  }
  return GroundScene{grid, std::move(rho)};
}

PlatformTrajectory::PlatformTrajectory(std::vector<Vec3> positions, double scene_diameter,
                                       double far_field_ratio)
    : positions_(std::move(positions)) {
  if (positions_.empty()) throw GeometryError("trajectory has no positions");
  for (std::size_t n = 0; n < positions_.size(); ++n) {
    const double range = positions_[n].norm();
    if (!(range > 0.0)) {
      throw GeometryError("platform position " + std::to_string(n) + " is at zero range");
    }
    if (range < far_field_ratio * scene_diameter) {
      std::ostringstream msg;
      msg << "platform position " << n << " at range " << range
          << " m violates the far-field requirement (" << far_field_ratio << " x "
          << scene_diameter << " m)";
      throw GeometryError(msg.str());
    }
  }
}

PlatformTrajectory PlatformTrajectory::circular(double ground_range, double altitude,
                                                double start_angle, double extent,
                                                std::size_t count, double scene_diameter,
                                                double far_field_ratio) {
  if (count == 0) throw ParameterError("trajectory pulse count must be at least 1");
  const bool closed = std::abs(extent) >= 2.0 * kPi * (1.0 - 1e-12);
  const double step =
      count == 1 ? 0.0 : extent / static_cast<double>(closed ? count : count - 1);
  std::vector<Vec3> pos;
  pos.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double a = start_angle + step * static_cast<double>(n);
    pos.emplace_back(ground_range * std::cos(a), ground_range * std::sin(a), altitude);
  }
  return PlatformTrajectory(std::move(pos), scene_diameter, far_field_ratio);
}

PlatformTrajectory PlatformTrajectory::linear(const Vec3& start, const Vec3& end,
                                              std::size_t count, double scene_diameter,
                                              double far_field_ratio) {
  if (count == 0) throw ParameterError("trajectory pulse count must be at least 1");
  std::vector<Vec3> pos;
  pos.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double t = count == 1 ? 0.0 : static_cast<double>(n) / static_cast<double>(count - 1);
    pos.push_back(start + t * (end - start));
  }
  return PlatformTrajectory(std::move(pos), scene_diameter, far_field_ratio);
}

const Vec3& PlatformTrajectory::position(std::size_t n) const {
  if (n >= positions_.size()) {
    throw ParameterError("slow-time index " + std::to_string(n) + " beyond trajectory end");
  }
  return positions_[n];
}

FrequencyGrid::FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {
  if (omega_.empty()) throw ParameterError("frequency grid is empty");
  for (std::size_t m = 0; m < omega_.size(); ++m) {
    if (!(omega_[m] > 0.0) || !std::isfinite(omega_[m])) {
      throw ParameterError("frequency sample " + std::to_string(m) + " is not positive");
    }
    if (m > 0 && !(omega_[m] > omega_[m - 1])) {
      throw ParameterError("frequency samples must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::from_band(double center_hz, double bandwidth_hz, std::size_t n) {
  if (n == 0) throw ParameterError("frequency sample count must be at least 1");
  std::vector<double> omega(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double f = n == 1 ? center_hz
                            : center_hz - 0.5 * bandwidth_hz +
                                  bandwidth_hz * static_cast<double>(m) /
                                      static_cast<double>(n - 1);
    omega[m] = 2.0 * kPi * f;
  }
  return FrequencyGrid(std::move(omega));
}

Vec3 unit_look_direction(const Vec3& position) {
  const double range = position.norm();
  if (!(range > 0.0)) throw GeometryError("unit look direction undefined at zero range");
  return {position.x() / range, position.y() / range, 0.0};
}

Vec3 unit_look_direction(const PlatformTrajectory& traj, std::size_t n) {
  return unit_look_direction(traj.position(n));
}

Vec2 xi_sample(double omega, const Vec3& position) {
  if (!(omega > 0.0)) throw ParameterError("xi_sample requires omega > 0");
  const Vec3 look = unit_look_direction(position);
  const double scale = 2.0 * omega / kSpeedOfLight;
  return {scale * look.x(), scale * look.y()};
}

Vec2 xi_sample(double omega, const PlatformTrajectory& traj, std::size_t n) {
  return xi_sample(omega, traj.position(n));
}

std::vector<Vec2> xi_samples(const FrequencyGrid& freqs, const Vec3& position) {
  std::vector<Vec2> xi;
  xi.reserve(freqs.size());
  for (double w : freqs.omegas()) xi.push_back(xi_sample(w, position));
  return xi;
}

namespace {

void check_raster(const ImagingGrid& grid, const RealVector& values) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw ShapeError("raster length " + std::to_string(values.size()) +
                     " does not match grid size " + std::to_string(grid.size()));
  }
}

}  // namespace

void write_raster_csv(const std::filesystem::path& path, const ImagingGrid& grid,
                      const RealVector& values) {
  check_raster(grid, values);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (std::size_t iy = 0; iy < grid.n_y(); ++iy) {
    for (std::size_t ix = 0; ix < grid.n_x(); ++ix) {
      if (ix) out << ',';
      out << values[static_cast<Eigen::Index>(grid.index(ix, iy))];
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_raster_binary(const std::filesystem::path& path, const ImagingGrid& grid,
                         const RealVector& values) {
  check_raster(grid, values);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n_x()));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.n_y()));
  for (Eigen::Index i = 0; i < values.size(); ++i) binio::put<double>(out, values[i]);
}

Raster read_raster_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::Reader rd(in, path.string());
  Raster r;
  r.n_x = rd.get<std::uint32_t>();
  r.n_y = rd.get<std::uint32_t>();
  r.values.resize(static_cast<Eigen::Index>(r.n_x * r.n_y));
  for (Eigen::Index i = 0; i < r.values.size(); ++i) r.values[i] = rd.get<double>();
  return r;
}

}  // namespace edgesar
