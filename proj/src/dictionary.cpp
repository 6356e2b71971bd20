#include "edgesar/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "edgesar/binary_io.hpp"
#include "edgesar/errors.hpp"

namespace edgesar {

namespace {

constexpr char kDictMagic[4] = {'E', 'S', 'D', 'C'};
constexpr std::uint32_t kDictVersion = 1;

double ramp(double half_extent, double offset, double h) {
  return std::clamp((half_extent - std::abs(offset)) / h + 0.5, 0.0, 1.0);
}

}  // namespace

RealVector rasterize_edgelet(const ImagingGrid& grid, const EdgeletParams& params) {
  const double h = std::min(grid.dx(), grid.dy());
  const Vec2 along(std::cos(params.orientation), std::sin(params.orientation));
  const Vec2 across(-along.y(), along.x());
  RealVector raster(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 d = grid.pixel_centers()[i] - params.center;
    raster[static_cast<Eigen::Index>(i)] =
        ramp(0.5 * params.length, d.dot(along), h) * ramp(0.5 * params.thickness, d.dot(across), h);
  }
  return raster;
}

std::vector<double> atom_center_lattice(std::size_t n, double d, std::size_t stride) {
  const std::size_t count = (n - 1) / stride + 1;
  std::vector<double> c(count);
  const double half_span = 0.5 * static_cast<double>((count - 1) * stride);
  for (std::size_t k = 0; k < count; ++k) {
    c[k] = (static_cast<double>(k * stride) - half_span) * d;
  }
  return c;
}

EdgeletDictionary build_edgelet_dictionary(const ImagingGrid& grid,
                                           const DictionaryOptions& options) {
  if (options.n_orientations < 1) throw ParameterError("dictionary needs n_orientations >= 1");
  if (options.n_scales < 1) throw ParameterError("dictionary needs n_scales >= 1");
  if (options.stride < 1) throw ParameterError("dictionary needs stride >= 1");
  if (!(options.base_length_px > 0.0) || !(options.thickness_px > 0.0)) {
    throw ParameterError("edgelet length and thickness must be positive");
  }
  const double h = std::min(grid.dx(), grid.dy());
  const auto cx = atom_center_lattice(grid.n_x(), grid.dx(), options.stride);
  const auto cy = atom_center_lattice(grid.n_y(), grid.dy(), options.stride);

  std::vector<EdgeletParams> params;
  std::vector<RealVector> columns;
  for (double y : cy) {
    for (double x : cx) {
      for (std::size_t o = 0; o < options.n_orientations; ++o) {
        for (std::size_t s = 0; s < options.n_scales; ++s) {
          EdgeletParams p;
          p.center = Vec2(x, y);
          p.orientation = kPi * static_cast<double>(o) / static_cast<double>(options.n_orientations);
          p.length = options.base_length_px * std::ldexp(1.0, static_cast<int>(s)) * h;
          p.thickness = options.thickness_px * h;
          RealVector atom = rasterize_edgelet(grid, p);
          atom.array() -= atom.mean();
          const double norm = atom.norm();
          if (!(norm > 1e-12 * std::sqrt(static_cast<double>(grid.size())))) continue;
          columns.push_back(atom / norm);
          params.push_back(p);
        }
      }
    }
  }
  if (columns.empty()) throw ParameterError("edgelet dictionary is empty for these parameters");

  RealMatrix atoms(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) atoms.col(static_cast<Eigen::Index>(j)) = columns[j];
  return EdgeletDictionary{grid, std::move(atoms), std::move(params)};
}

MeasurementOperator compose_measurement_operator(const ForwardMatrix& forward,
                                                 const EdgeletDictionary& dict,
                                                 const RealVector& weights,
                                                 OperatorConvention convention) {
  if (forward.entries.cols() != dict.atoms.rows()) {
    throw ShapeError("forward matrix has " + std::to_string(forward.entries.cols()) +
                     " columns but the dictionary grid has " +
                     std::to_string(dict.atoms.rows()) + " pixels");
  }
  MeasurementOperator g;
  g.pulse_index = forward.pulse_index;
  g.entries = forward.entries * dict.atoms.cast<cplx>();
  if (convention == OperatorConvention::FoldedWeight) {
    if (weights.size() != forward.entries.rows()) {
      throw ShapeError("weight vector length does not match forward matrix rows");
    }
    g.entries = weights.cast<cplx>().asDiagonal() * g.entries;
  }
  return g;
}

CoherenceReport coherence_report(const RealMatrix& atoms, std::size_t n_bins) {
  if (atoms.cols() < 2) throw ParameterError("coherence needs at least two atoms");
  if (n_bins == 0) n_bins = 1;
  const RealMatrix gram = (atoms.transpose() * atoms).cwiseAbs();
  CoherenceReport rep;
  rep.counts.assign(n_bins, 0);
  rep.bin_edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b) {
    rep.bin_edges[b] = static_cast<double>(b) / static_cast<double>(n_bins);
  }
  for (Eigen::Index j = 1; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double v = gram(i, j);
      rep.max_coherence = std::max(rep.max_coherence, v);
      auto b = static_cast<std::size_t>(v * static_cast<double>(n_bins));
      rep.counts[std::min(b, n_bins - 1)]++;
    }
  }
  return rep;
}

void save_dictionary(const std::filesystem::path& path, const EdgeletDictionary& dict) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kDictMagic, 4);
  binio::put<std::uint32_t>(out, kDictVersion);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.atoms.rows()));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.atoms.cols()));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.grid.n_x()));
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.grid.n_y()));
  binio::put<double>(out, dict.grid.extent_x());
  binio::put<double>(out, dict.grid.extent_y());
  for (Eigen::Index j = 0; j < dict.atoms.cols(); ++j) {
    for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) binio::put<double>(out, dict.atoms(i, j));
  }
  for (const auto& p : dict.params) {
    binio::put<double>(out, p.center.x());
    binio::put<double>(out, p.center.y());
    binio::put<double>(out, p.orientation);
    binio::put<double>(out, p.length);
    binio::put<double>(out, p.thickness);
  }
}

EdgeletDictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  binio::Reader rd(in, path.string());
  char magic[4];
  for (char& ch : magic) ch = rd.get<char>();
  if (std::string(magic, 4) != std::string(kDictMagic, 4)) rd.fail("bad dictionary magic");
  if (rd.get<std::uint32_t>() != kDictVersion) rd.fail("unsupported dictionary version");
  const auto n = rd.get<std::uint32_t>();
  const auto m = rd.get<std::uint32_t>();
  const auto n_x = rd.get<std::uint32_t>();
  const auto n_y = rd.get<std::uint32_t>();
  const double ex = rd.get<double>();
  const double ey = rd.get<double>();
  if (static_cast<std::uint64_t>(n_x) * n_y != n) rd.fail("grid size does not match N");
  ImagingGrid grid(ex, ey, n_x, n_y);
  RealMatrix atoms(n, m);
  for (std::uint32_t j = 0; j < m; ++j) {
    for (std::uint32_t i = 0; i < n; ++i) atoms(i, j) = rd.get<double>();
  }
  std::vector<EdgeletParams> params(m);
  for (auto& p : params) {
    p.center.x() = rd.get<double>();
    p.center.y() = rd.get<double>();
    p.orientation = rd.get<double>();
    p.length = rd.get<double>();
    p.thickness = rd.get<double>();
  }
  return EdgeletDictionary{std::move(grid), std::move(atoms), std::move(params)};
}

}  // namespace edgesar
