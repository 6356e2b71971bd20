#pragma once

#include <filesystem>
#include <vector>

#include "edgesar/forward_model.hpp"
#include "edgesar/geometry.hpp"
#include "edgesar/types.hpp"

namespace edgesar {

/// Physical description of one edgelet: an oriented segment. Lengths in metres,
/// orientation in radians from the +x axis.
struct EdgeletParams {
  Vec2 center{0.0, 0.0};
  double orientation = 0.0;
  double length = 0.0;
  double thickness = 0.0;

  bool operator==(const EdgeletParams&) const = default;
};

struct DictionaryOptions {
  std::size_t n_orientations = 8;
  std::size_t n_scales = 2;
  std::size_t stride = 2;         // pixels between atom centres
  double base_length_px = 3.0;    // segment length at scale 0; doubles per scale
  double thickness_px = 1.0;
};

/// Columns of `atoms` are zero-mean, unit-norm rasters of edgelets on `grid`.
struct EdgeletDictionary {
  ImagingGrid grid;
  RealMatrix atoms;  // N x M
  std::vector<EdgeletParams> params;

  std::size_t size() const { return params.size(); }
};

/// Anti-aliased raster of one segment: coverage along and across the segment
/// falls off linearly over one pixel at each end.
RealVector rasterize_edgelet(const ImagingGrid& grid, const EdgeletParams& params);

/// Centres lie on an origin-symmetric lattice with `stride` pixel spacing;
/// orientation j is j*pi/n_orientations; scale s has length base * 2^s.
/// Atoms are mean-subtracted and normalized. Atoms that vanish are dropped.
/// Throws ParameterError if nothing remains.
EdgeletDictionary build_edgelet_dictionary(const ImagingGrid& grid,
                                           const DictionaryOptions& options);

/// Atom centre coordinates along one axis for a grid of n pixels of width d.
std::vector<double> atom_center_lattice(std::size_t n, double d, std::size_t stride);

/// How the Laplacian weight enters the measurement operator.
///   EdgeDomain:    G = F H   (H c models the edge map rho_E; data pre-weighted)
///   FoldedWeight:  G = W F H (H c models the reflectivity rho)
enum class OperatorConvention { EdgeDomain, FoldedWeight };

struct MeasurementOperator {
  ComplexMatrix entries;  // N_r x M
  std::uint32_t pulse_index = 0;
};

MeasurementOperator compose_measurement_operator(
    const ForwardMatrix& forward, const EdgeletDictionary& dict, const RealVector& weights,
    OperatorConvention convention = OperatorConvention::EdgeDomain);

struct CoherenceReport {
  double max_coherence = 0.0;
  std::vector<double> bin_edges;     // histogram of |<h_i, h_j>| for i < j
  std::vector<std::size_t> counts;
};

CoherenceReport coherence_report(const RealMatrix& atoms, std::size_t n_bins = 20);
inline CoherenceReport coherence_report(const EdgeletDictionary& dict, std::size_t n_bins = 20) {
  return coherence_report(dict.atoms, n_bins);
}

// Persistence: magic "ESDC", u32 version, u32 N, u32 M, u32 n_x, u32 n_y,
// f64 extent_x, f64 extent_y, then N*M f64 column-major, then M records of
// (f64 cx, f64 cy, f64 orientation, f64 length, f64 thickness).
void save_dictionary(const std::filesystem::path& path, const EdgeletDictionary& dict);
EdgeletDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace edgesar
