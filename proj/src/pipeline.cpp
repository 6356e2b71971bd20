#include "edgesar/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>

#include "edgesar/errors.hpp"

namespace edgesar {

namespace fs = std::filesystem;

std::size_t env_thread_count() {
  const char* v = std::getenv("EDGESAR_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || n < 1) return 1;
  return static_cast<std::size_t>(n);
}

SimulatedPulseSource::SimulatedPulseSource(const ExperimentConfig& config, std::size_t first,
                                           std::size_t lookahead)
    : scene_(make_synthetic_scene(config.make_grid(), config.scene)),
      traj_(config.make_trajectory()),
      freqs_(config.make_frequencies()),
      mode_(config.simulation),
      noise_(config.noise),
      seed_(config.seed),
      next_(first),
      lookahead_(std::max<std::size_t>(lookahead, 1)) {}

PulseRecord SimulatedPulseSource::make(std::size_t n) const {
  const auto noiseless = NoiseCovariance::noiseless(freqs_.size());
  PulseRecord rec = simulate_pulse(scene_, traj_, n, freqs_, mode_, noiseless, seed_);
  if (!noise_.enabled()) return rec;
  double sigma2 = noise_.sigma2.value_or(0.0);
  if (noise_.snr_db) {
    const double power = rec.data.squaredNorm() / static_cast<double>(rec.data.size());
    sigma2 = power / std::pow(10.0, *noise_.snr_db / 10.0);
  }
  if (!(sigma2 > 0.0)) return rec;
  rec.noise_cov = NoiseCovariance::scaled_identity(freqs_.size(), sigma2);
  rec.data = add_noise(rec.data, rec.noise_cov, seed_ + n);
  return rec;
}

std::optional<PulseRecord> SimulatedPulseSource::next() {
  if (lookahead_ <= 1) {
    if (next_ >= traj_.size()) return std::nullopt;
    return make(next_++);
  }
  while (pending_.size() < lookahead_ && next_ < traj_.size()) {
    const std::size_t n = next_++;
    pending_.push_back(std::async(std::launch::async, [this, n] { return make(n); }));
  }
  if (pending_.empty()) return std::nullopt;
  PulseRecord rec = pending_.front().get();
  pending_.pop_front();
  return rec;
}

ReplayPulseSource::ReplayPulseSource(const fs::path& path, std::size_t skip) : reader_(path) {
  for (std::size_t k = 0; k < skip; ++k) {
    if (!reader_.next()) {
      throw IoError(path.string() + ": dump ends before the checkpointed pulse count");
    }
  }
}

std::optional<PulseRecord> ReplayPulseSource::next() { return reader_.next(); }

SupportScore support_scores(const RealVector& truth, const RealVector& estimate,
                            double rel_threshold) {
  if (truth.size() != estimate.size()) throw ShapeError("support_scores: size mismatch");
  const double t_thr = rel_threshold * truth.cwiseAbs().maxCoeff();
  const double e_thr = rel_threshold * estimate.cwiseAbs().maxCoeff();
  std::size_t tp = 0;
  std::size_t pos_truth = 0;
  std::size_t pos_est = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    const bool t = t_thr > 0.0 && std::abs(truth[i]) >= t_thr;
    const bool e = e_thr > 0.0 && std::abs(estimate[i]) >= e_thr;
    pos_truth += t;
    pos_est += e;
    tp += (t && e);
  }
  SupportScore s;
  s.precision = pos_est ? static_cast<double>(tp) / static_cast<double>(pos_est) : 0.0;
  s.recall = pos_truth ? static_cast<double>(tp) / static_cast<double>(pos_truth) : 0.0;
  return s;
}

PulseProducts prepare_pulse(const PulseRecord& pulse, const FrequencyGrid& freqs,
                            const EdgeletDictionary& dict, double p) {
  PulseProducts out;
  out.measurement = filter_pulse(pulse, freqs, p);
  const ForwardMatrix f = build_forward_matrix(dict.grid, out.measurement.xi_points, pulse.index);
  out.op = compose_measurement_operator(f, dict, laplacian_weights(out.measurement.xi_points, p),
                                        OperatorConvention::EdgeDomain);
  return out;
}

void write_metrics_csv(const fs::path& path, const MetricsRecord& metrics) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "pulse,objective,nonzeros,relative_error,precision,recall,iterations,wall_ms\n"
      << std::setprecision(17);
  for (const auto& r : metrics.rows) {
    out << r.pulse << ',' << r.objective << ',' << r.nonzeros << ',' << r.relative_error << ','
        << r.precision << ',' << r.recall << ',' << r.iterations << ',' << r.wall_ms << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void emit_plot_data(const MetricsRecord& metrics, const fs::path& out_dir,
                    const ImagingGrid& grid, const RealVector& scene, const RealVector& oracle,
                    const RealVector& reconstruction) {
  if (metrics.rows.empty()) throw ParameterError("emit_plot_data: no metrics rows");
  try {
    fs::create_directories(out_dir);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
  {
    std::ofstream out(out_dir / "objective_trace.csv");
    if (!out) throw IoError("cannot write objective_trace.csv in " + out_dir.string());
    out << "pulse,objective\n" << std::setprecision(17);
    for (const auto& r : metrics.rows) out << r.pulse << ',' << r.objective << '\n';
  }
  {
    std::ofstream out(out_dir / "error_curve.csv");
    if (!out) throw IoError("cannot write error_curve.csv in " + out_dir.string());
    out << "pulses,relative_error,precision,recall\n" << std::setprecision(17);
    for (const auto& r : metrics.rows) {
      out << (r.pulse + 1) << ',' << r.relative_error << ',' << r.precision << ',' << r.recall
          << '\n';
    }
  }
  write_raster_csv(out_dir / "scene.csv", grid, scene);
  write_raster_binary(out_dir / "scene.bin", grid, scene);
  write_raster_csv(out_dir / "oracle_edge_map.csv", grid, oracle);
  write_raster_binary(out_dir / "oracle_edge_map.bin", grid, oracle);
  write_raster_csv(out_dir / "reconstruction.csv", grid, reconstruction);
  write_raster_binary(out_dir / "reconstruction.bin", grid, reconstruction);
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  using clock = std::chrono::steady_clock;
  const ImagingGrid grid = config.make_grid();
  const GroundScene scene = make_synthetic_scene(grid, config.scene);
  const EdgeMap oracle = reference_edge_map(scene, config.edge_order);
  const double oracle_norm = oracle.values.norm();
  const EdgeletDictionary dict = build_edgelet_dictionary(grid, config.dictionary);

  OnlineSolver solver = options.resume
                            ? OnlineSolver::load_checkpoint(*options.resume, config.solver)
                            : OnlineSolver(dict.size(), config.solver);
  if (solver.stats().atoms() != dict.size()) {
    throw ConfigError("checkpoint has " + std::to_string(solver.stats().atoms()) +
                      " atoms but the configured dictionary has " + std::to_string(dict.size()));
  }
  const auto first = static_cast<std::size_t>(solver.stats().pulse_count);
  const std::size_t threads = options.threads ? options.threads : env_thread_count();

  std::unique_ptr<PulseSource> source;
  if (options.pulse_dump) {
    source = std::make_unique<ReplayPulseSource>(*options.pulse_dump, first);
  } else {
    source = std::make_unique<SimulatedPulseSource>(config, first, threads);
  }
  const FrequencyGrid freqs = source->frequencies();

  const fs::path out_dir = config.output_dir;
  std::ofstream metrics_out;
  std::ofstream timing_out;
  if (options.write_artifacts) {
    fs::create_directories(out_dir);
    metrics_out.open(out_dir / "metrics.csv");
    timing_out.open(out_dir / "timing.csv");
    if (!metrics_out || !timing_out) {
      throw IoError("cannot open metrics files in " + out_dir.string());
    }
    metrics_out << "pulse,objective,nonzeros,relative_error,precision,recall,iterations,wall_ms\n"
                << std::setprecision(17);
    timing_out << "pulse,wall_ms\n" << std::setprecision(6);
  }

  RunSummary summary;
  summary.total_pulses = first;
  RealVector recon = RealVector::Zero(static_cast<Eigen::Index>(grid.size()));
  while (!options.stop_after || summary.total_pulses < *options.stop_after) {
    std::optional<PulseRecord> pulse = source->next();
    if (!pulse) break;
    const auto t0 = clock::now();
    const PulseProducts prod = prepare_pulse(*pulse, freqs, dict, config.edge_order);
    pulse.reset();
    const Coefficients* coeffs = nullptr;
    try {
      coeffs = &solver.step(prod.op.entries, prod.measurement.noise_cov, prod.measurement.data);
    } catch (const NumericalError& e) {
      throw NumericalError("pulse " + std::to_string(prod.measurement.index) + ": " + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

    recon = edge_map_from_coefficients(dict, coeffs->c).values;
    MetricsRow row;
    row.pulse = prod.measurement.index;
    row.objective = coeffs->objective;
    row.nonzeros = static_cast<std::size_t>((coeffs->c.array() != cplx(0.0, 0.0)).count());
    row.relative_error = oracle_norm > 0.0 ? (recon - oracle.values).norm() / oracle_norm : 0.0;
    const SupportScore s = support_scores(oracle.values, recon);
    row.precision = s.precision;
    row.recall = s.recall;
    row.iterations = coeffs->iterations;
    row.wall_ms = config.deterministic ? 0.0 : ms;
    summary.metrics.rows.push_back(row);
    if (options.write_artifacts) {
      metrics_out << row.pulse << ',' << row.objective << ',' << row.nonzeros << ','
                  << row.relative_error << ',' << row.precision << ',' << row.recall << ','
                  << row.iterations << ',' << row.wall_ms << '\n';
      timing_out << row.pulse << ',' << ms << '\n';
    }
    ++summary.pulses_processed;
    ++summary.total_pulses;
    if (options.write_artifacts && config.checkpoint_every > 0 &&
        summary.total_pulses % config.checkpoint_every == 0) {
      solver.save_checkpoint(out_dir / "checkpoint.bin");
    }
  }

  if (summary.pulses_processed == 0 && !options.resume) {
    throw ConfigError("trajectory.pulses: no pulses were processed");
  }
  summary.coefficients = solver.coefficients();
  summary.stats = solver.stats();
  summary.oracle_edge_map = oracle.values;
  summary.reconstruction = edge_map_from_coefficients(dict, solver.coefficients().c).values;

  if (options.write_artifacts) {
    metrics_out.flush();
    if (!metrics_out) throw IoError("failed writing metrics.csv");
    solver.save_checkpoint(out_dir / "checkpoint.bin");
    if (!summary.metrics.rows.empty()) {
      emit_plot_data(summary.metrics, out_dir, grid, scene.reflectivity, oracle.values,
                     summary.reconstruction);
    }
  }
  return summary;
}

std::size_t simulate_to_dump(const ExperimentConfig& config, const fs::path& path,
                             std::size_t threads) {
  SimulatedPulseSource source(config, 0, threads ? threads : env_thread_count());
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  PulseDumpWriter writer(path, source.frequencies());
  std::size_t count = 0;
  while (auto pulse = source.next()) {
    writer.write(*pulse);
    ++count;
  }
  return count;
}

}  // namespace edgesar
