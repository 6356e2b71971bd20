#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>

#include "edgesar/noise.hpp"
#include "edgesar/types.hpp"

namespace edgesar {

/// Streaming sufficient statistics of the weighted least-squares term:
///   A = sum_k G_k^H R_k^{-1} G_k,  b = sum_k G_k^H R_k^{-1} d_k,
///   data_energy = sum_k d_k^H R_k^{-1} d_k.
struct SufficientStats {
  ComplexMatrix A;
  ComplexVector b;
  std::uint64_t pulse_count = 0;
  double data_energy = 0.0;

  static SufficientStats empty(std::size_t atoms);
  std::size_t atoms() const { return static_cast<std::size_t>(b.size()); }
};

enum class LipschitzMode { ExactSpectral, PowerIteration };

/// Complex coefficients (default) or coefficients restricted to the reals.
enum class CoefficientDomain { Complex, Real };

struct SolverConfig {
  /// Fixed regularization weight. When unset the online solver uses
  /// lambda_rel * ||b_1||_inf after the first pulse.
  std::optional<double> lambda;
  double lambda_rel = 0.01;
  std::size_t max_iters = 5000;
  double rel_tol = 1e-10;
  LipschitzMode lipschitz_mode = LipschitzMode::ExactSpectral;
  std::size_t power_iters = 1000;
  bool warm_start = true;
  bool adaptive_restart = true;
  CoefficientDomain domain = CoefficientDomain::Complex;
};

struct Coefficients {
  ComplexVector c;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  static Coefficients zeros(std::size_t atoms);
};

/// Adds one pulse. R^{-1} is applied through whitening (triangular solves).
void accumulate_stats(SufficientStats& stats, const ComplexMatrix& G, const NoiseCovariance& R,
                      const ComplexVector& d);
SufficientStats update_stats(SufficientStats stats, const ComplexMatrix& G,
                             const NoiseCovariance& R, const ComplexVector& d);

/// 0.5 Re(c^H A c) - Re(b^H c) + 0.5 e + lambda ||c||_1.
double objective(const SufficientStats& stats, const ComplexVector& c, double lambda);
/// Smooth part only (lambda = 0).
double smooth_objective(const SufficientStats& stats, const ComplexVector& c);
/// A c - b.
ComplexVector gradient(const SufficientStats& stats, const ComplexVector& c);

struct LipschitzEstimate {
  double value = 0.0;
  /// A is numerically zero; the solver returns c = 0.
  bool zero_matrix = false;
  std::size_t iterations = 0;
  /// Dominant eigenvector (power mode), reusable as the next warm start.
  ComplexVector vector;
};

/// ExactSpectral: ||A||_2 from a Hermitian eigensolve. PowerIteration: power
/// method from `warm` (or a fixed pseudo-random start) until the estimate
/// settles to 1e-10 relative or `max_iters`, then scaled by 1.01.
LipschitzEstimate lipschitz_constant(const SufficientStats& stats, LipschitzMode mode,
                                     std::size_t max_iters = 1000,
                                     const ComplexVector* warm = nullptr);

/// v_j * max(0, 1 - tau / |v_j|); zero entries stay zero.
ComplexVector soft_threshold(const ComplexVector& v, double tau);

/// Per-iteration callback: (iteration, objective of the iterate).
using IterationObserver = std::function<void(std::size_t, double)>;

/// FISTA on the weighted LASSO defined by the statistics, using config.lambda
/// (which must be set). Returns the best iterate seen, so the objective never
/// exceeds the initial one. Throws NumericalError on non-finite iterates.
Coefficients fista_solve(const SufficientStats& stats, const SolverConfig& config,
                         const Coefficients& init, double lipschitz,
                         const IterationObserver& observer = {});
Coefficients fista_solve(const SufficientStats& stats, const SolverConfig& config,
                         const Coefficients& init);

/// One online update: accumulate then solve, warm-started from prev when
/// config.warm_start is set.
std::pair<SufficientStats, Coefficients> online_step(SufficientStats stats,
                                                     const ComplexMatrix& G,
                                                     const NoiseCovariance& R,
                                                     const ComplexVector& d,
                                                     const SolverConfig& config,
                                                     const Coefficients& prev);

/// Owns the streaming state (A_n, b_n, e_n, c_n, lambda, Lipschitz warm start).
/// No pulse data is retained between steps.
class OnlineSolver {
 public:
  OnlineSolver(std::size_t atoms, SolverConfig config);

  const Coefficients& step(const ComplexMatrix& G, const NoiseCovariance& R,
                           const ComplexVector& d, const IterationObserver& observer = {});

  const SufficientStats& stats() const { return stats_; }
  const Coefficients& coefficients() const { return coeffs_; }
  const SolverConfig& config() const { return config_; }
  std::optional<double> lambda() const { return lambda_; }
  double lipschitz() const { return lipschitz_; }

  // Checkpoint: magic "ESCK", u32 version, u32 M, u64 n, f64 lambda, A as
  // M*M (f64 re, f64 im) column-major, b as M pairs, f64 e_n, c as M pairs,
  // u32 K then K pairs of the power-iteration warm-start vector.
  void save_checkpoint(const std::filesystem::path& path) const;
  static OnlineSolver load_checkpoint(const std::filesystem::path& path, SolverConfig config);

 private:
  SolverConfig config_;
  SufficientStats stats_;
  Coefficients coeffs_;
  std::optional<double> lambda_;
  double lipschitz_ = 0.0;
  ComplexVector power_vector_;
};

}  // namespace edgesar
