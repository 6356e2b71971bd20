#include "edgesar/forward_model.hpp"

#include <cmath>
#include <iomanip>
#include <random>

#include "edgesar/binary_io.hpp"
#include "edgesar/errors.hpp"

namespace edgesar {

namespace {

constexpr char kPulseMagic[4] = {'E', 'S', 'P', 'D'};
constexpr std::uint32_t kPulseVersion = 1;

cplx phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

void check_length(const ComplexVector& v, const FrequencyGrid& freqs, const char* what) {
  if (static_cast<std::size_t>(v.size()) != freqs.size()) {
    throw ShapeError(std::string(what) + ": data length " + std::to_string(v.size()) +
                     " does not match frequency grid length " + std::to_string(freqs.size()));
  }
}

ComplexVector apply_range_phase(const ComplexVector& v, const Vec3& position,
                                const FrequencyGrid& freqs, double sign) {
  const double range = position.norm();
  ComplexVector out(v.size());
  for (Eigen::Index m = 0; m < v.size(); ++m) {
    const double k = 2.0 * freqs.omega(static_cast<std::size_t>(m)) / kSpeedOfLight;
    out[m] = v[m] * phase(sign * k * range);
  }
  return out;
}

}  // namespace

ComplexVector simulate_pulse_exact(const GroundScene& scene, const PlatformTrajectory& traj,
                                   std::size_t n, const FrequencyGrid& freqs) {
  const Vec3& gamma = traj.position(n);
  const double area = scene.grid.pixel_area();
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t i = 0; i < scene.grid.size(); ++i) {
    const double rho = scene.reflectivity[static_cast<Eigen::Index>(i)];
    if (rho == 0.0) continue;
    const double dist = (gamma - scene.position3d(i)).norm();
    for (std::size_t m = 0; m < freqs.size(); ++m) {
      const double k = 2.0 * freqs.omega(m) / kSpeedOfLight;
      out[static_cast<Eigen::Index>(m)] += rho * area * phase(k * dist);
    }
  }
  return out;
}

ComplexVector compensate_phase(const ComplexVector& raw, const Vec3& position,
                               const FrequencyGrid& freqs) {
  check_length(raw, freqs, "compensate_phase");
  return apply_range_phase(raw, position, freqs, -1.0);
}

ComplexVector compensate_phase(const ComplexVector& raw, const PlatformTrajectory& traj,
                               std::size_t n, const FrequencyGrid& freqs) {
  return compensate_phase(raw, traj.position(n), freqs);
}

ComplexVector uncompensate_phase(const ComplexVector& compensated, const Vec3& position,
                                 const FrequencyGrid& freqs) {
  check_length(compensated, freqs, "uncompensate_phase");
  return apply_range_phase(compensated, position, freqs, +1.0);
}

ComplexVector simulate_pulse_farfield(const GroundScene& scene, const PlatformTrajectory& traj,
                                      std::size_t n, const FrequencyGrid& freqs) {
  const std::vector<Vec2> xi = xi_samples(freqs, traj.position(n));
  const double area = scene.grid.pixel_area();
  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t i = 0; i < scene.grid.size(); ++i) {
    const double rho = scene.reflectivity[static_cast<Eigen::Index>(i)];
    if (rho == 0.0) continue;
    const Vec2& x = scene.grid.pixel_centers()[i];
    for (std::size_t m = 0; m < xi.size(); ++m) {
      out[static_cast<Eigen::Index>(m)] += rho * area * phase(-x.dot(xi[m]));
    }
  }
  return out;
}

ForwardMatrix build_forward_matrix(const ImagingGrid& grid, const std::vector<Vec2>& xi,
                                   std::uint32_t pulse_index) {
  ForwardMatrix f;
  f.pulse_index = pulse_index;
  f.n_x = grid.n_x();
  f.n_y = grid.n_y();
  f.entries.resize(static_cast<Eigen::Index>(xi.size()), static_cast<Eigen::Index>(grid.size()));
  const double area = grid.pixel_area();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2& x = grid.pixel_centers()[i];
    for (std::size_t m = 0; m < xi.size(); ++m) {
      f.entries(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) =
          area * phase(-x.dot(xi[m]));
    }
  }
  return f;
}

ForwardMatrix build_forward_matrix(const ImagingGrid& grid, const PlatformTrajectory& traj,
                                   std::size_t n, const FrequencyGrid& freqs) {
  return build_forward_matrix(grid, xi_samples(freqs, traj.position(n)),
                              static_cast<std::uint32_t>(n));
}

ComplexVector add_noise(const ComplexVector& data, const NoiseCovariance& cov,
                        std::uint64_t seed) {
  if (static_cast<std::size_t>(data.size()) != cov.dim()) {
    throw ShapeError("add_noise: covariance dimension does not match data length");
  }
  if (cov.kind() == NoiseCovariance::Kind::Noiseless) return data;
  std::mt19937_64 rng(seed);
  return data + cov.sample(rng);
}

PulseRecord simulate_pulse(const GroundScene& scene, const PlatformTrajectory& traj,
                           std::size_t n, const FrequencyGrid& freqs, SimulationMode mode,
                           const NoiseCovariance& cov, std::uint64_t base_seed) {
  const Vec3& gamma = traj.position(n);
  ComplexVector clean = mode == SimulationMode::Exact
                            ? simulate_pulse_exact(scene, traj, n, freqs)
                            : uncompensate_phase(simulate_pulse_farfield(scene, traj, n, freqs),
                                                 gamma, freqs);
  PulseRecord rec;
  rec.index = static_cast<std::uint32_t>(n);
  rec.position = gamma;
  rec.data = add_noise(clean, cov, base_seed + n);
  rec.noise_cov = cov;
  return rec;
}

PulseDumpWriter::PulseDumpWriter(const std::filesystem::path& path, const FrequencyGrid& freqs)
    : out_(path, std::ios::binary), n_r_(freqs.size()) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_.write(kPulseMagic, 4);
  binio::put<std::uint32_t>(out_, kPulseVersion);
  binio::put<std::uint32_t>(out_, static_cast<std::uint32_t>(n_r_));
  for (double w : freqs.omegas()) binio::put<double>(out_, w);
}

void PulseDumpWriter::write(const PulseRecord& pulse) {
  if (static_cast<std::size_t>(pulse.data.size()) != n_r_ || pulse.noise_cov.dim() != n_r_) {
    throw ShapeError("pulse record does not match the dump's frequency grid");
  }
  binio::put<std::uint32_t>(out_, pulse.index);
  for (int a = 0; a < 3; ++a) binio::put<double>(out_, pulse.position[a]);
  binio::put<std::uint32_t>(out_, static_cast<std::uint32_t>(n_r_));
  for (Eigen::Index m = 0; m < pulse.data.size(); ++m) {
    binio::put<double>(out_, pulse.data[m].real());
    binio::put<double>(out_, pulse.data[m].imag());
  }
  write_covariance(out_, pulse.noise_cov);
  out_.flush();
  if (!out_) throw IoError("failed writing pulse record");
}

PulseDumpReader::PulseDumpReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), name_(path.string()) {
  if (!in_) throw IoError("cannot open " + name_);
  binio::Reader rd(in_, name_);
  char magic[4];
  for (char& ch : magic) ch = rd.get<char>();
  if (std::string(magic, 4) != std::string(kPulseMagic, 4)) rd.fail("bad pulse dump magic");
  if (rd.get<std::uint32_t>() != kPulseVersion) rd.fail("unsupported pulse dump version");
  const auto n_r = rd.get<std::uint32_t>();
  std::vector<double> omega(n_r);
  for (auto& w : omega) w = rd.get<double>();
  try {
    freqs_.emplace(std::move(omega));
  } catch (const Error& e) {
    rd.fail(std::string("invalid frequency grid (") + e.what() + ")");
  }
  offset_ = rd.offset();
}

std::optional<PulseRecord> PulseDumpReader::next() {
  binio::Reader rd(in_, name_, offset_);
  if (rd.at_end()) return std::nullopt;
  const std::uint64_t record_start = rd.offset();
  PulseRecord rec;
  rec.index = rd.get<std::uint32_t>();
  for (int a = 0; a < 3; ++a) rec.position[a] = rd.get<double>();
  const auto n_r = rd.get<std::uint32_t>();
  if (n_r != freqs_->size()) {
    rd.fail("record at offset " + std::to_string(record_start) + " has N_r " +
            std::to_string(n_r) + ", header says " + std::to_string(freqs_->size()));
  }
  rec.data.resize(n_r);
  for (std::uint32_t m = 0; m < n_r; ++m) {
    const double re = rd.get<double>();
    const double im = rd.get<double>();
    rec.data[m] = cplx(re, im);
  }
  rec.noise_cov = read_covariance(rd, n_r);
  offset_ = rd.offset();
  return rec;
}

void append_pulse_csv(std::ostream& out, const PulseRecord& pulse, const FrequencyGrid& freqs) {
  check_length(pulse.data, freqs, "append_pulse_csv");
  out << std::setprecision(17);
  for (Eigen::Index m = 0; m < pulse.data.size(); ++m) {
    out << pulse.index << ',' << m << ',' << freqs.omega(static_cast<std::size_t>(m)) << ','
        << pulse.data[m].real() << ',' << pulse.data[m].imag() << '\n';
  }
}

}  // namespace edgesar
