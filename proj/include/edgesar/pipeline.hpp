#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <future>
#include <memory>
#include <optional>
#include <vector>

#include "edgesar/config.hpp"
#include "edgesar/edge_filter.hpp"
#include "edgesar/forward_model.hpp"
#include "edgesar/solver.hpp"

namespace edgesar {

/// Produces pulses one at a time; consumers never hold more than one.
class PulseSource {
 public:
  virtual ~PulseSource() = default;
  virtual std::optional<PulseRecord> next() = 0;
  virtual const FrequencyGrid& frequencies() const = 0;
};

/// Simulates pulses [first, traj.size()) on demand. With lookahead > 1 the
/// next few pulses are simulated concurrently; each pulse draws its noise from
/// its own seed (seed + n), so results do not depend on the lookahead.
class SimulatedPulseSource : public PulseSource {
 public:
  SimulatedPulseSource(const ExperimentConfig& config, std::size_t first = 0,
                       std::size_t lookahead = 1);
  std::optional<PulseRecord> next() override;
  const FrequencyGrid& frequencies() const override { return freqs_; }

  /// Builds pulse n (noise included) without touching the stream position.
  PulseRecord make(std::size_t n) const;

 private:
  GroundScene scene_;
  PlatformTrajectory traj_;
  FrequencyGrid freqs_;
  SimulationMode mode_;
  NoiseConfig noise_;
  std::uint64_t seed_;
  std::size_t next_;
  std::size_t lookahead_;
  std::deque<std::future<PulseRecord>> pending_;
};

/// Streams a pulse dump, optionally skipping records already consumed.
class ReplayPulseSource : public PulseSource {
 public:
  explicit ReplayPulseSource(const std::filesystem::path& path, std::size_t skip = 0);
  std::optional<PulseRecord> next() override;
  const FrequencyGrid& frequencies() const override { return reader_.frequencies(); }

 private:
  PulseDumpReader reader_;
};

/// Thin wrapper for the replay operation.
inline ReplayPulseSource replay_pulses(const std::filesystem::path& dump_path) {
  return ReplayPulseSource(dump_path);
}

struct MetricsRow {
  std::uint32_t pulse = 0;
  double objective = 0.0;
  std::size_t nonzeros = 0;
  double relative_error = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
};

struct MetricsRecord {
  std::vector<MetricsRow> rows;
};

struct SupportScore {
  double precision = 0.0;
  double recall = 0.0;
};

/// Both maps binarized at `rel_threshold` of their own max |value|.
SupportScore support_scores(const RealVector& truth, const RealVector& estimate,
                            double rel_threshold = 0.1);

/// Turns one raw pulse into the solver inputs (d, G, R) under the edge-domain
/// convention.
struct PulseProducts {
  EdgeMeasurement measurement;
  MeasurementOperator op;
};
PulseProducts prepare_pulse(const PulseRecord& pulse, const FrequencyGrid& freqs,
                            const EdgeletDictionary& dict, double p);

struct RunOptions {
  /// Replay this dump instead of simulating.
  std::optional<std::filesystem::path> pulse_dump;
  /// Resume from a checkpoint written by an earlier run.
  std::optional<std::filesystem::path> resume;
  /// Stop after this many pulses in total (including resumed ones).
  std::optional<std::size_t> stop_after;
  /// Concurrent simulation lookahead; 0 reads EDGESAR_THREADS (default 1).
  std::size_t threads = 0;
  bool write_artifacts = true;
};

struct RunSummary {
  std::size_t pulses_processed = 0;
  std::size_t total_pulses = 0;
  Coefficients coefficients;
  SufficientStats stats;
  MetricsRecord metrics;
  RealVector oracle_edge_map;
  RealVector reconstruction;
};

/// End-to-end online reconstruction. Artifacts written to config.output_dir:
/// scene.{csv,bin}, oracle_edge_map.{csv,bin}, reconstruction.{csv,bin},
/// metrics.csv, objective_trace.csv, error_curve.csv, timing.csv and
/// checkpoint.bin.
RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Simulates all pulses into a dump file; returns the pulse count.
std::size_t simulate_to_dump(const ExperimentConfig& config, const std::filesystem::path& path,
                             std::size_t threads = 0);

void write_metrics_csv(const std::filesystem::path& path, const MetricsRecord& metrics);

/// Plot-ready CSVs (objective trace and error curve) plus the paired rasters.
void emit_plot_data(const MetricsRecord& metrics, const std::filesystem::path& out_dir,
                    const ImagingGrid& grid, const RealVector& scene,
                    const RealVector& oracle, const RealVector& reconstruction);

/// Thread count from EDGESAR_THREADS (>= 1).
std::size_t env_thread_count();

}  // namespace edgesar
