#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "edgesar/dictionary.hpp"
#include "edgesar/forward_model.hpp"
#include "edgesar/geometry.hpp"
#include "edgesar/noise.hpp"

namespace edgesar {

/// Laplacian-weighted, phase-compensated pulse data with its spatial-frequency
/// sample points. Samples whose weight is zero (xi = 0) are dropped;
/// `source_rows` maps each kept sample back to its frequency index.
struct EdgeMeasurement {
  std::uint32_t index = 0;
  Vec3 position = Vec3::Zero();
  std::vector<Vec2> xi_points;
  ComplexVector data;
  double laplacian_order = 2.0;
  NoiseCovariance noise_cov = NoiseCovariance::noiseless(0);
  std::vector<std::size_t> source_rows;

  std::size_t size() const { return xi_points.size(); }
};

struct EdgeMap {
  ImagingGrid grid;
  RealVector values;
};

/// |xi|^p for each sample point.
RealVector laplacian_weights(const std::vector<Vec2>& xi, double p);

/// Multiplies sample m by |xi_m|^p. Throws ParameterError for p < 1.
ComplexVector apply_edge_filter(const ComplexVector& dtilde, const std::vector<Vec2>& xi,
                                double p);

/// Phase compensation followed by Laplacian weighting. The noise covariance
/// becomes W R W^H restricted to the samples with nonzero weight.
EdgeMeasurement filter_pulse(const PulseRecord& record, const FrequencyGrid& freqs, double p);
/// As above; also checks that the record was taken at traj position record.index.
EdgeMeasurement filter_pulse(const PulseRecord& record, const PlatformTrajectory& traj,
                             const FrequencyGrid& freqs, double p);

/// Edge map L * rho computed spectrally: 2D DFT, multiply bin by |xi|^p with
/// physical frequencies, inverse DFT, real part. The DC bin is zeroed. Grid
/// sample counts must be even.
EdgeMap reference_edge_map(const GroundScene& scene, double p);

/// H c on the dictionary grid. The real part is returned; the norm of the
/// discarded imaginary part is written to `imag_residual` when given.
EdgeMap edge_map_from_coefficients(const EdgeletDictionary& dict, const ComplexVector& c,
                                   double* imag_residual = nullptr);

// Edge-measurement dump. File header: magic "ESEM", u32 version. Per record:
// u32 n, 3 f64 gamma, u32 K, K (f64 re, f64 im), covariance (see noise.hpp),
// K (f64 xi_x, f64 xi_y), f64 p, K u32 source rows.
class EdgeMeasurementWriter {
 public:
  explicit EdgeMeasurementWriter(const std::filesystem::path& path);
  void write(const EdgeMeasurement& m);

 private:
  std::ofstream out_;
};

class EdgeMeasurementReader {
 public:
  explicit EdgeMeasurementReader(const std::filesystem::path& path);
  std::optional<EdgeMeasurement> next();

 private:
  std::ifstream in_;
  std::string name_;
  std::uint64_t offset_ = 0;
};

}  // namespace edgesar
