#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "edgesar/geometry.hpp"
#include "edgesar/noise.hpp"
#include "edgesar/types.hpp"

namespace edgesar {

/// One slow-time measurement in the fast-time frequency domain.
struct PulseRecord {
  std::uint32_t index = 0;
  Vec3 position = Vec3::Zero();
  ComplexVector data;
  NoiseCovariance noise_cov = NoiseCovariance::noiseless(0);
};

/// Discrete far-field forward map at one pulse: entry (m, i) is
/// pixel_area * exp(-j x_i . xi_m).
struct ForwardMatrix {
  ComplexMatrix entries;
  std::uint32_t pulse_index = 0;
  std::size_t n_x = 0;
  std::size_t n_y = 0;
};

enum class SimulationMode { Exact, FarField };

/// Discretized response with the exact two-way range, before phase
/// compensation: sum_i rho_i exp(+j (2 w_m / c) |gamma - x_i|) * pixel_area.
ComplexVector simulate_pulse_exact(const GroundScene& scene, const PlatformTrajectory& traj,
                                   std::size_t n, const FrequencyGrid& freqs);

/// Multiplies sample m by exp(-j (2 w_m / c) |gamma(s_n)|), referencing the
/// phase to the scene centre.
ComplexVector compensate_phase(const ComplexVector& raw, const Vec3& position,
                               const FrequencyGrid& freqs);
ComplexVector compensate_phase(const ComplexVector& raw, const PlatformTrajectory& traj,
                               std::size_t n, const FrequencyGrid& freqs);
/// Inverse of compensate_phase.
ComplexVector uncompensate_phase(const ComplexVector& compensated, const Vec3& position,
                                 const FrequencyGrid& freqs);

/// Phase-compensated response under the far-field phase; equals F_n rho.
ComplexVector simulate_pulse_farfield(const GroundScene& scene, const PlatformTrajectory& traj,
                                      std::size_t n, const FrequencyGrid& freqs);

ForwardMatrix build_forward_matrix(const ImagingGrid& grid, const PlatformTrajectory& traj,
                                   std::size_t n, const FrequencyGrid& freqs);
/// Forward matrix for explicit spatial-frequency samples.
ForwardMatrix build_forward_matrix(const ImagingGrid& grid, const std::vector<Vec2>& xi,
                                   std::uint32_t pulse_index = 0);

/// data + noise drawn from cov using a generator seeded with `seed`.
ComplexVector add_noise(const ComplexVector& data, const NoiseCovariance& cov,
                        std::uint64_t seed);

/// Simulates pulse n (exact or far-field phase) and attaches noise drawn with
/// seed base_seed + n. The returned data is the raw, uncompensated signal in
/// both modes, so downstream processing is identical.
PulseRecord simulate_pulse(const GroundScene& scene, const PlatformTrajectory& traj,
                           std::size_t n, const FrequencyGrid& freqs, SimulationMode mode,
                           const NoiseCovariance& cov, std::uint64_t base_seed);

// Pulse dump. File header: magic "ESPD", u32 version, u32 N_r, N_r f64 omega.
// Then per pulse: u32 n, 3 f64 gamma, u32 N_r, N_r (f64 re, f64 im), u32
// covariance tag, then tag-specific parameters (none | f64 sigma2 | N_r f64
// variances | N_r*N_r complex pairs, column-major). All little-endian.
class PulseDumpWriter {
 public:
  PulseDumpWriter(const std::filesystem::path& path, const FrequencyGrid& freqs);
  void write(const PulseRecord& pulse);

 private:
  std::ofstream out_;
  std::size_t n_r_;
};

class PulseDumpReader {
 public:
  explicit PulseDumpReader(const std::filesystem::path& path);
  const FrequencyGrid& frequencies() const { return *freqs_; }
  /// Next record, or nullopt at a clean end of file. Malformed or truncated
  /// records raise IoError naming the byte offset.
  std::optional<PulseRecord> next();

 private:
  std::ifstream in_;
  std::string name_;
  std::uint64_t offset_ = 0;
  std::optional<FrequencyGrid> freqs_;
};

/// Debug CSV: one line per sample, "n,m,omega,re,im".
void append_pulse_csv(std::ostream& out, const PulseRecord& pulse, const FrequencyGrid& freqs);

}  // namespace edgesar
