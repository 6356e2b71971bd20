#include "edgesar/solver.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "edgesar/binary_io.hpp"
#include "edgesar/errors.hpp"

namespace edgesar {

namespace {

constexpr char kCheckpointMagic[4] = {'E', 'S', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

void check_dims(const SufficientStats& stats, const ComplexVector& c, const char* what) {
  if (c.size() != stats.b.size()) {
    throw ShapeError(std::string(what) + ": coefficient length " + std::to_string(c.size()) +
                     " does not match " + std::to_string(stats.b.size()) + " atoms");
  }
}

ComplexVector to_domain(ComplexVector v, CoefficientDomain domain) {
  if (domain == CoefficientDomain::Real) v = v.real().cast<cplx>();
  return v;
}

double l1_norm(const ComplexVector& c) { return c.cwiseAbs().sum(); }

// Objective given a precomputed A c.
double objective_with(const SufficientStats& stats, const ComplexVector& c,
                      const ComplexVector& ac, double lambda) {
  return 0.5 * c.dot(ac).real() - stats.b.dot(c).real() + 0.5 * stats.data_energy +
         lambda * l1_norm(c);
}

ComplexVector deterministic_start(std::size_t m) {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexVector v(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = u(rng);
    const double im = u(rng);
    v[i] = cplx(re, im);
  }
  return v.normalized();
}

void put_complex(std::ostream& out, cplx z) {
  binio::put<double>(out, z.real());
  binio::put<double>(out, z.imag());
}

cplx get_complex(binio::Reader& rd) {
  const double re = rd.get<double>();
  const double im = rd.get<double>();
  return {re, im};
}

}  // namespace

SufficientStats SufficientStats::empty(std::size_t atoms) {
  const auto m = static_cast<Eigen::Index>(atoms);
  return SufficientStats{ComplexMatrix::Zero(m, m), ComplexVector::Zero(m), 0, 0.0};
}

Coefficients Coefficients::zeros(std::size_t atoms) {
  Coefficients c;
  c.c = ComplexVector::Zero(static_cast<Eigen::Index>(atoms));
  return c;
}

void accumulate_stats(SufficientStats& stats, const ComplexMatrix& G, const NoiseCovariance& R,
                      const ComplexVector& d) {
  if (G.cols() != stats.A.cols()) {
    throw ShapeError("update_stats: operator has " + std::to_string(G.cols()) +
                     " columns, statistics have " + std::to_string(stats.A.cols()) + " atoms");
  }
  if (G.rows() != d.size() || static_cast<std::size_t>(d.size()) != R.dim()) {
    throw ShapeError("update_stats: operator rows, data length and covariance differ");
  }
  ComplexMatrix gw = G;
  ComplexVector dw = d;
  R.whiten(gw);
  R.whiten(dw);
  if (!gw.allFinite() || !dw.allFinite()) {
    throw NumericalError("update_stats: non-finite whitened data (covariance not positive definite?)");
  }
  stats.A.noalias() += gw.adjoint() * gw;
  stats.A = (0.5 * (stats.A + stats.A.adjoint())).eval();
  stats.b.noalias() += gw.adjoint() * dw;
  stats.data_energy += dw.squaredNorm();
  stats.pulse_count += 1;
}

SufficientStats update_stats(SufficientStats stats, const ComplexMatrix& G,
                             const NoiseCovariance& R, const ComplexVector& d) {
  accumulate_stats(stats, G, R, d);
  return stats;
}

double objective(const SufficientStats& stats, const ComplexVector& c, double lambda) {
  check_dims(stats, c, "objective");
  return objective_with(stats, c, stats.A * c, lambda);
}

double smooth_objective(const SufficientStats& stats, const ComplexVector& c) {
  return objective(stats, c, 0.0);
}

ComplexVector gradient(const SufficientStats& stats, const ComplexVector& c) {
  check_dims(stats, c, "gradient");
  return stats.A * c - stats.b;
}

LipschitzEstimate lipschitz_constant(const SufficientStats& stats, LipschitzMode mode,
                                     std::size_t max_iters, const ComplexVector* warm) {
  LipschitzEstimate est;
  const double scale = stats.A.cwiseAbs().maxCoeff();
  if (stats.A.size() == 0 || !(scale > 0.0)) {
    est.zero_matrix = true;
    return est;
  }
  if (mode == LipschitzMode::ExactSpectral) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(stats.A, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve failed");
    est.value = eig.eigenvalues().cwiseAbs().maxCoeff();
    est.zero_matrix = !(est.value > 0.0);
    return est;
  }

  const std::size_t m = stats.atoms();
  ComplexVector v = (warm && warm->size() == stats.b.size() && warm->norm() > 0.0)
                        ? warm->normalized()
                        : deterministic_start(m);
  double value = 0.0;
  for (std::size_t it = 1; it <= std::max<std::size_t>(max_iters, 1); ++it) {
    ComplexVector av = stats.A * v;
    const double next = av.norm();
    est.iterations = it;
    if (!(next > 0.0)) {
      // Start vector in the null space; restart from the fixed vector once.
      v = deterministic_start(m);
      continue;
    }
    v = av / next;
    const bool settled = std::abs(next - value) <= 1e-10 * next;
    value = next;
    if (settled) break;
  }
  est.value = 1.01 * value;
  est.vector = std::move(v);
  est.zero_matrix = !(est.value > 0.0);
  return est;
}

ComplexVector soft_threshold(const ComplexVector& v, double tau) {
  if (tau < 0.0) throw ParameterError("soft_threshold needs tau >= 0");
  ComplexVector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mag = std::abs(v[j]);
    out[j] = mag <= tau ? cplx(0.0, 0.0) : v[j] * (1.0 - tau / mag);
  }
  return out;
}

Coefficients fista_solve(const SufficientStats& stats, const SolverConfig& config,
                         const Coefficients& init, double lipschitz,
                         const IterationObserver& observer) {
  if (!config.lambda) throw ParameterError("fista_solve: lambda is not set");
  const double lambda = *config.lambda;
  if (!(lambda > 0.0)) throw ParameterError("fista_solve: lambda must be positive");
  if (!(config.rel_tol > 0.0)) throw ParameterError("fista_solve: rel_tol must be positive");
  check_dims(stats, init.c, "fista_solve");
  const std::size_t m = stats.atoms();

  // Zero is optimal when every gradient entry at zero lies inside the l1 ball;
  // one shrinkage step from zero lands there, so count it as one iteration.
  const ComplexVector b_dom = to_domain(stats.b, config.domain);
  if (!(lipschitz > 0.0) || b_dom.cwiseAbs().maxCoeff() <= lambda) {
    Coefficients zero = Coefficients::zeros(m);
    zero.objective = 0.5 * stats.data_energy;
    zero.iterations = 1;
    zero.converged = true;
    return zero;
  }

  ComplexVector x_prev = to_domain(init.c, config.domain);
  ComplexVector ax_prev = stats.A * x_prev;
  Coefficients best;
  best.c = x_prev;
  best.objective = objective_with(stats, x_prev, ax_prev, lambda);
  double f_prev = best.objective;

  ComplexVector y = x_prev;
  ComplexVector ay = ax_prev;
  double t = 1.0;
  const double step = 1.0 / lipschitz;
  bool converged = false;
  std::size_t it = 0;
  while (it < config.max_iters) {
    ++it;
    const ComplexVector grad = ay - stats.b;
    ComplexVector x = soft_threshold(to_domain(y - step * grad, config.domain), lambda * step);
    ComplexVector ax = stats.A * x;
    const double f = objective_with(stats, x, ax, lambda);
    if (!std::isfinite(f) || !x.allFinite()) {
      throw NumericalError("fista_solve: non-finite iterate at iteration " + std::to_string(it));
    }
    if (observer) observer(it, f);
    if (f < best.objective) {
      best.objective = f;
      best.c = x;
    }
    const double change = (x - x_prev).norm() / std::max(1.0, x.norm());
    if (config.adaptive_restart && f > f_prev) {
      t = 1.0;
      y = x;
      ay = ax;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / t_next;
      y = x + beta * (x - x_prev);
      ay = ax + beta * (ax - ax_prev);
      t = t_next;
    }
    x_prev = std::move(x);
    ax_prev = std::move(ax);
    f_prev = f;
    if (change < config.rel_tol) {
      converged = true;
      break;
    }
  }
  best.iterations = it;
  best.converged = converged;
  return best;
}

Coefficients fista_solve(const SufficientStats& stats, const SolverConfig& config,
                         const Coefficients& init) {
  const auto lip = lipschitz_constant(stats, config.lipschitz_mode, config.power_iters);
  return fista_solve(stats, config, init, lip.zero_matrix ? 0.0 : lip.value);
}

std::pair<SufficientStats, Coefficients> online_step(SufficientStats stats,
                                                     const ComplexMatrix& G,
                                                     const NoiseCovariance& R,
                                                     const ComplexVector& d,
                                                     const SolverConfig& config,
                                                     const Coefficients& prev) {
  accumulate_stats(stats, G, R, d);
  SolverConfig cfg = config;
  if (!cfg.lambda) cfg.lambda = cfg.lambda_rel * stats.b.cwiseAbs().maxCoeff();
  const Coefficients init =
      config.warm_start && prev.c.size() == stats.b.size() ? prev : Coefficients::zeros(stats.atoms());
  Coefficients out = fista_solve(stats, cfg, init);
  return {std::move(stats), std::move(out)};
}

OnlineSolver::OnlineSolver(std::size_t atoms, SolverConfig config)
    : config_(std::move(config)),
      stats_(SufficientStats::empty(atoms)),
      coeffs_(Coefficients::zeros(atoms)),
      lambda_(config_.lambda) {
  if (lambda_ && !(*lambda_ > 0.0)) throw ParameterError("lambda must be positive");
  if (!(config_.rel_tol > 0.0)) throw ParameterError("rel_tol must be positive");
  coeffs_.objective = 0.0;
}

const Coefficients& OnlineSolver::step(const ComplexMatrix& G, const NoiseCovariance& R,
                                       const ComplexVector& d, const IterationObserver& observer) {
  accumulate_stats(stats_, G, R, d);
  if (!lambda_) {
    const double binf = stats_.b.cwiseAbs().maxCoeff();
    if (binf > 0.0) lambda_ = config_.lambda_rel * binf;
  }
  const ComplexVector* warm = power_vector_.size() ? &power_vector_ : nullptr;
  auto lip = lipschitz_constant(stats_, config_.lipschitz_mode, config_.power_iters, warm);
  lipschitz_ = lip.zero_matrix ? 0.0 : lip.value;
  if (lip.vector.size()) power_vector_ = std::move(lip.vector);

  if (!lambda_) {
    // No signal yet: b = 0, so c = 0 is optimal for any lambda.
    coeffs_ = Coefficients::zeros(stats_.atoms());
    coeffs_.objective = 0.5 * stats_.data_energy;
    coeffs_.converged = true;
    return coeffs_;
  }
  SolverConfig cfg = config_;
  cfg.lambda = lambda_;
  const Coefficients init = config_.warm_start ? coeffs_ : Coefficients::zeros(stats_.atoms());
  coeffs_ = fista_solve(stats_, cfg, init, lipschitz_, observer);
  return coeffs_;
}

void OnlineSolver::save_checkpoint(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(kCheckpointMagic, 4);
    binio::put<std::uint32_t>(out, kCheckpointVersion);
    const auto m = static_cast<std::uint32_t>(stats_.atoms());
    binio::put<std::uint32_t>(out, m);
    binio::put<std::uint64_t>(out, stats_.pulse_count);
    binio::put<double>(out, lambda_.value_or(0.0));
    for (Eigen::Index j = 0; j < stats_.A.cols(); ++j) {
      for (Eigen::Index i = 0; i < stats_.A.rows(); ++i) put_complex(out, stats_.A(i, j));
    }
    for (Eigen::Index i = 0; i < stats_.b.size(); ++i) put_complex(out, stats_.b[i]);
    binio::put<double>(out, stats_.data_energy);
    for (Eigen::Index i = 0; i < coeffs_.c.size(); ++i) put_complex(out, coeffs_.c[i]);
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(power_vector_.size()));
    for (Eigen::Index i = 0; i < power_vector_.size(); ++i) put_complex(out, power_vector_[i]);
    out.flush();
    if (!out) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

OnlineSolver OnlineSolver::load_checkpoint(const std::filesystem::path& path,
                                           SolverConfig config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  binio::Reader rd(in, path.string());
  char magic[4];
  for (char& ch : magic) ch = rd.get<char>();
  if (std::string(magic, 4) != std::string(kCheckpointMagic, 4)) rd.fail("bad checkpoint magic");
  if (rd.get<std::uint32_t>() != kCheckpointVersion) rd.fail("unsupported checkpoint version");
  const auto m = rd.get<std::uint32_t>();
  const auto n = rd.get<std::uint64_t>();
  const double lambda = rd.get<double>();

  OnlineSolver s(m, config);
  s.stats_.pulse_count = n;
  if (lambda > 0.0) s.lambda_ = lambda;
  for (std::uint32_t j = 0; j < m; ++j) {
    for (std::uint32_t i = 0; i < m; ++i) s.stats_.A(i, j) = get_complex(rd);
  }
  for (std::uint32_t i = 0; i < m; ++i) s.stats_.b[i] = get_complex(rd);
  s.stats_.data_energy = rd.get<double>();
  for (std::uint32_t i = 0; i < m; ++i) s.coeffs_.c[i] = get_complex(rd);
  const auto k = rd.get<std::uint32_t>();
  if (k != 0 && k != m) rd.fail("power vector length mismatch");
  s.power_vector_.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) s.power_vector_[i] = get_complex(rd);
  if (s.lambda_) s.coeffs_.objective = objective(s.stats_, s.coeffs_.c, *s.lambda_);
  return s;
}

}  // namespace edgesar
