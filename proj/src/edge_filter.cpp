#include "edgesar/edge_filter.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

#include "edgesar/binary_io.hpp"
#include "edgesar/errors.hpp"

namespace edgesar {

namespace {

constexpr char kEdgeMagic[4] = {'E', 'S', 'E', 'M'};
constexpr std::uint32_t kEdgeVersion = 1;

void check_order(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ParameterError("Laplacian order p must be >= 1 (got " + std::to_string(p) + ")");
  }
}

double weight(double norm2, double p) { return norm2 == 0.0 ? 0.0 : std::pow(norm2, 0.5 * p); }

// Signed physical frequency of DFT bin k on an n-point axis with spacing d.
double bin_frequency(std::size_t k, std::size_t n, double d) {
  const auto ks = static_cast<double>(k) - (2 * k >= n ? static_cast<double>(n) : 0.0);
  return 2.0 * kPi * ks / (static_cast<double>(n) * d);
}

}  // namespace

RealVector laplacian_weights(const std::vector<Vec2>& xi, double p) {
  check_order(p);
  RealVector w(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t m = 0; m < xi.size(); ++m) {
    w[static_cast<Eigen::Index>(m)] = weight(xi[m].squaredNorm(), p);
  }
  return w;
}

ComplexVector apply_edge_filter(const ComplexVector& dtilde, const std::vector<Vec2>& xi,
                                double p) {
  if (static_cast<std::size_t>(dtilde.size()) != xi.size()) {
    throw ShapeError("apply_edge_filter: data and xi lengths differ");
  }
  const RealVector w = laplacian_weights(xi, p);
  return w.cast<cplx>().cwiseProduct(dtilde);
}

EdgeMeasurement filter_pulse(const PulseRecord& record, const FrequencyGrid& freqs, double p) {
  if (static_cast<std::size_t>(record.data.size()) != freqs.size() ||
      record.noise_cov.dim() != freqs.size()) {
    throw ShapeError("filter_pulse: record does not match the frequency grid");
  }
  const std::vector<Vec2> xi = xi_samples(freqs, record.position);
  const ComplexVector filtered =
      apply_edge_filter(compensate_phase(record.data, record.position, freqs), xi, p);
  const RealVector w = laplacian_weights(xi, p);

  EdgeMeasurement out;
  out.index = record.index;
  out.position = record.position;
  out.laplacian_order = p;
  for (std::size_t m = 0; m < xi.size(); ++m) {
    if (w[static_cast<Eigen::Index>(m)] != 0.0) out.source_rows.push_back(m);
  }
  const auto k = static_cast<Eigen::Index>(out.source_rows.size());
  out.data.resize(k);
  RealVector kept_w(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto m = out.source_rows[static_cast<std::size_t>(i)];
    out.xi_points.push_back(xi[m]);
    out.data[i] = filtered[static_cast<Eigen::Index>(m)];
    kept_w[i] = w[static_cast<Eigen::Index>(m)];
  }
  out.noise_cov = record.noise_cov.select(out.source_rows).weighted(kept_w);
  return out;
}

EdgeMeasurement filter_pulse(const PulseRecord& record, const PlatformTrajectory& traj,
                             const FrequencyGrid& freqs, double p) {
  if ((traj.position(record.index) - record.position).norm() >
      1e-9 * std::max(1.0, record.position.norm())) {
    throw GeometryError("pulse " + std::to_string(record.index) +
                        " position disagrees with the trajectory");
  }
  return filter_pulse(record, freqs, p);
}

EdgeMap reference_edge_map(const GroundScene& scene, double p) {
  check_order(p);
  const ImagingGrid& g = scene.grid;
  const std::size_t nx = g.n_x();
  const std::size_t ny = g.n_y();
  if (nx % 2 != 0 || ny % 2 != 0) {
    throw ParameterError("reference_edge_map needs even grid sample counts");
  }
  Eigen::FFT<double> fft;
  std::vector<std::vector<cplx>> rows(ny, std::vector<cplx>(nx));
  std::vector<cplx> in;
  std::vector<cplx> out;

  for (std::size_t iy = 0; iy < ny; ++iy) {
    in.assign(nx, 0.0);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      in[ix] = scene.reflectivity[static_cast<Eigen::Index>(g.index(ix, iy))];
    }
    fft.fwd(rows[iy], in);
  }
  // Column transforms, weighting, inverse column transforms.
  for (std::size_t kx = 0; kx < nx; ++kx) {
    in.resize(ny);
    for (std::size_t iy = 0; iy < ny; ++iy) in[iy] = rows[iy][kx];
    fft.fwd(out, in);
    const double fx = bin_frequency(kx, nx, g.dx());
    for (std::size_t ky = 0; ky < ny; ++ky) {
      const double fy = bin_frequency(ky, ny, g.dy());
      out[ky] *= weight(fx * fx + fy * fy, p);
    }
    if (kx == 0) out[0] = 0.0;
    fft.inv(in, out);
    for (std::size_t iy = 0; iy < ny; ++iy) rows[iy][kx] = in[iy];
  }
  EdgeMap map{g, RealVector(static_cast<Eigen::Index>(g.size()))};
  for (std::size_t iy = 0; iy < ny; ++iy) {
    fft.inv(out, rows[iy]);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      map.values[static_cast<Eigen::Index>(g.index(ix, iy))] = out[ix].real();
    }
  }
  return map;
}

EdgeMap edge_map_from_coefficients(const EdgeletDictionary& dict, const ComplexVector& c,
                                   double* imag_residual) {
  if (c.size() != dict.atoms.cols()) {
    throw ShapeError("coefficient length " + std::to_string(c.size()) +
                     " does not match dictionary size " + std::to_string(dict.atoms.cols()));
  }
  const RealVector re = dict.atoms * c.real();
  if (imag_residual) *imag_residual = (dict.atoms * c.imag()).norm();
  return EdgeMap{dict.grid, re};
}

EdgeMeasurementWriter::EdgeMeasurementWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_.write(kEdgeMagic, 4);
  binio::put<std::uint32_t>(out_, kEdgeVersion);
}

void EdgeMeasurementWriter::write(const EdgeMeasurement& m) {
  const std::size_t k = m.size();
  if (static_cast<std::size_t>(m.data.size()) != k || m.noise_cov.dim() != k ||
      m.source_rows.size() != k) {
    throw ShapeError("edge measurement fields have inconsistent lengths");
  }
  binio::put<std::uint32_t>(out_, m.index);
  for (int a = 0; a < 3; ++a) binio::put<double>(out_, m.position[a]);
  binio::put<std::uint32_t>(out_, static_cast<std::uint32_t>(k));
  for (Eigen::Index i = 0; i < m.data.size(); ++i) {
    binio::put<double>(out_, m.data[i].real());
    binio::put<double>(out_, m.data[i].imag());
  }
  write_covariance(out_, m.noise_cov);
  for (const Vec2& xi : m.xi_points) {
    binio::put<double>(out_, xi.x());
    binio::put<double>(out_, xi.y());
  }
  binio::put<double>(out_, m.laplacian_order);
  for (std::size_t r : m.source_rows) binio::put<std::uint32_t>(out_, static_cast<std::uint32_t>(r));
  out_.flush();
}

EdgeMeasurementReader::EdgeMeasurementReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), name_(path.string()) {
  if (!in_) throw IoError("cannot open " + name_);
  binio::Reader rd(in_, name_);
  char magic[4];
  for (char& ch : magic) ch = rd.get<char>();
  if (std::string(magic, 4) != std::string(kEdgeMagic, 4)) rd.fail("bad edge dump magic");
  if (rd.get<std::uint32_t>() != kEdgeVersion) rd.fail("unsupported edge dump version");
  offset_ = rd.offset();
}

std::optional<EdgeMeasurement> EdgeMeasurementReader::next() {
  binio::Reader rd(in_, name_, offset_);
  if (rd.at_end()) return std::nullopt;
  EdgeMeasurement m;
  m.index = rd.get<std::uint32_t>();
  for (int a = 0; a < 3; ++a) m.position[a] = rd.get<double>();
  const auto k = rd.get<std::uint32_t>();
  m.data.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const double re = rd.get<double>();
    const double im = rd.get<double>();
    m.data[i] = cplx(re, im);
  }
  m.noise_cov = read_covariance(rd, k);
  m.xi_points.resize(k);
  for (auto& xi : m.xi_points) {
    xi.x() = rd.get<double>();
    xi.y() = rd.get<double>();
  }
  m.laplacian_order = rd.get<double>();
  m.source_rows.resize(k);
  for (auto& r : m.source_rows) r = rd.get<std::uint32_t>();
  offset_ = rd.offset();
  return m;
}

}  // namespace edgesar
