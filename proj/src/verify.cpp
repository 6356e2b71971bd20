#include "edgesar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edgesar/edge_filter.hpp"
#include "edgesar/pipeline.hpp"

namespace edgesar {

namespace {

CheckResult at_most(std::string name, double value, double threshold) {
  return {std::move(name), std::isfinite(value) && value <= threshold, value, threshold};
}

double rel(const ComplexVector& a, const ComplexVector& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace

std::vector<CheckResult> verify_config(const ExperimentConfig& config) {
  std::vector<CheckResult> out;
  const ImagingGrid grid = config.make_grid();
  const GroundScene scene = make_synthetic_scene(grid, config.scene);
  const PlatformTrajectory traj = config.make_trajectory();
  const FrequencyGrid freqs = config.make_frequencies();
  const double p = config.edge_order;
  const double area = grid.pixel_area();

  // Forward matrix against direct per-sample summation.
  {
    const ForwardMatrix f = build_forward_matrix(grid, traj, 0, freqs);
    const auto xi = xi_samples(freqs, traj.position(0));
    ComplexVector direct = ComplexVector::Zero(static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t m = 0; m < xi.size(); ++m) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ph = -grid.pixel_centers()[i].dot(xi[m]);
        direct[static_cast<Eigen::Index>(m)] +=
            scene.reflectivity[static_cast<Eigen::Index>(i)] * area * cplx(std::cos(ph), std::sin(ph));
      }
    }
    out.push_back(at_most("forward matrix vs direct sum", rel(f.entries * scene.reflectivity.cast<cplx>(), direct), 1e-12));
  }

  // Phase compensation of a unit scatterer at the origin.
  {
    // Origin is not a pixel centre on even grids, so the single term is written out.
    const Vec3& gamma = traj.position(0);
    ComplexVector raw(static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t m = 0; m < freqs.size(); ++m) {
      const double k = 2.0 * freqs.omega(m) / kSpeedOfLight;
      raw[static_cast<Eigen::Index>(m)] = area * std::polar(1.0, k * gamma.norm());
    }
    const ComplexVector comp = compensate_phase(raw, gamma, freqs);
    const double spread = (comp.array() - cplx(area, 0.0)).abs().maxCoeff() / area;
    out.push_back(at_most("phase compensation fixed point", spread, 1e-9));
  }

  // Far-field error shrinks when the range grows.
  {
    const Vec3 near = traj.position(0);
    const double d = grid.diameter();
    std::vector<double> errs;
    for (double factor : {1.0, 10.0}) {
      const Vec3 pos = near * factor;
      PlatformTrajectory t({pos}, d, 0.0);
      const ComplexVector ff = simulate_pulse_farfield(scene, t, 0, freqs);
      const ComplexVector ex = compensate_phase(simulate_pulse_exact(scene, t, 0, freqs), t, 0, freqs);
      errs.push_back(ff.norm() > 0.0 ? (ff - ex).norm() / ff.norm() : 0.0);
    }
    out.push_back({"far-field error decreases with range", errs[1] <= errs[0], errs[1], errs[0]});
  }

  // filter_pulse on a noiseless pulse equals W F rho.
  const EdgeMap oracle = reference_edge_map(scene, p);
  {
    const PulseRecord pulse = simulate_pulse(scene, traj, 0, freqs, SimulationMode::FarField,
                                             NoiseCovariance::noiseless(freqs.size()), 0);
    const EdgeMeasurement meas = filter_pulse(pulse, traj, freqs, p);
    const ForwardMatrix f = build_forward_matrix(grid, meas.xi_points);
    const RealVector w = laplacian_weights(meas.xi_points, p);
    const ComplexVector wf = w.cast<cplx>().asDiagonal() * (f.entries * scene.reflectivity.cast<cplx>());
    out.push_back(at_most("filter_pulse = W F rho", rel(meas.data, wf), 1e-12));
    const ComplexVector fe = f.entries * oracle.values.cast<cplx>();
    out.push_back(at_most("edge-filter commutation (W F rho vs F rho_E)", rel(fe, wf), 5e-2));
  }

  // Dictionary normalization.
  const EdgeletDictionary dict = build_edgelet_dictionary(grid, config.dictionary);
  {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < dict.atoms.cols(); ++j) {
      worst = std::max(worst, std::abs(dict.atoms.col(j).norm() - 1.0));
      worst = std::max(worst, std::abs(dict.atoms.col(j).mean()));
    }
    out.push_back(at_most("dictionary unit norm and zero mean", worst, 1e-12));
  }

  // Streaming vs batch statistics over the first few pulses.
  const std::size_t k_pulses = std::min<std::size_t>(traj.size(), 4);
  SufficientStats stats = SufficientStats::empty(dict.size());
  {
    SimulatedPulseSource source(config);
    std::vector<ComplexMatrix> gs;
    std::vector<ComplexVector> ds;
    std::vector<NoiseCovariance> rs;
    for (std::size_t n = 0; n < k_pulses; ++n) {
      const PulseProducts prod = prepare_pulse(source.make(n), freqs, dict, p);
      accumulate_stats(stats, prod.op.entries, prod.measurement.noise_cov, prod.measurement.data);
      gs.push_back(prod.op.entries);
      ds.push_back(prod.measurement.data);
      rs.push_back(prod.measurement.noise_cov);
    }
    Eigen::Index rows = 0;
    for (const auto& g : gs) rows += g.rows();
    ComplexMatrix big(rows, static_cast<Eigen::Index>(dict.size()));
    ComplexVector bigd(rows);
    Eigen::Index r0 = 0;
    for (std::size_t k = 0; k < gs.size(); ++k) {
      ComplexMatrix g = gs[k];
      ComplexVector d = ds[k];
      rs[k].whiten(g);
      rs[k].whiten(d);
      big.middleRows(r0, g.rows()) = g;
      bigd.segment(r0, d.size()) = d;
      r0 += g.rows();
    }
    const ComplexMatrix a = big.adjoint() * big;
    const double ea = (stats.A - a).norm() / std::max(a.norm(), 1e-300);
    const double eb = rel(stats.b, big.adjoint() * bigd);
    out.push_back(at_most("streaming = batch statistics", std::max(ea, eb), 1e-12));
  }

  // Gradient against central differences, and the Lipschitz bound.
  {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexVector c(static_cast<Eigen::Index>(dict.size()));
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = cplx(g(rng), g(rng));
    const ComplexVector grad = gradient(stats, c);
    // Directional derivative along a random real direction u: Re(grad^H u).
    ComplexVector u(c.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = cplx(g(rng), g(rng));
    const double h = 1e-6 * std::max(1.0, c.norm());
    const double fd = (smooth_objective(stats, c + h * u) - smooth_objective(stats, c - h * u)) / (2.0 * h);
    const double an = grad.dot(u).real();
    out.push_back(at_most("gradient vs central difference", std::abs(fd - an) / std::max(std::abs(an), 1e-300), 1e-5));

    const auto lip = lipschitz_constant(stats, config.solver.lipschitz_mode, config.solver.power_iters);
    ComplexVector c2(c.size());
    for (Eigen::Index j = 0; j < c2.size(); ++j) c2[j] = cplx(g(rng), g(rng));
    const double lhs = (gradient(stats, c) - gradient(stats, c2)).norm();
    const double rhs = lip.value * (c - c2).norm();
    out.push_back({"Lipschitz bound holds", lhs <= rhs, lhs, rhs});
  }
  return out;
}

}  // namespace edgesar
