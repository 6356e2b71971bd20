#include "edgesar/noise.hpp"

#include <cmath>

#include "edgesar/errors.hpp"

namespace edgesar {

NoiseCovariance NoiseCovariance::noiseless(std::size_t dim) {
  NoiseCovariance c(Kind::Noiseless, dim);
  c.sigma2_ = 0.0;
  return c;
}

NoiseCovariance NoiseCovariance::scaled_identity(std::size_t dim, double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ParameterError("scaled-identity covariance needs sigma2 > 0 (use noiseless for zero)");
  }
  NoiseCovariance c(Kind::ScaledIdentity, dim);
  c.sigma2_ = sigma2;
  return c;
}

NoiseCovariance NoiseCovariance::diagonal(RealVector variances) {
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (!(variances[i] > 0.0) || !std::isfinite(variances[i])) {
      throw ParameterError("diagonal covariance entry " + std::to_string(i) +
                           " is not positive");
    }
  }
  NoiseCovariance c(Kind::Diagonal, static_cast<std::size_t>(variances.size()));
  c.variances_ = std::move(variances);
  return c;
}

NoiseCovariance NoiseCovariance::full(ComplexMatrix cov) {
  if (cov.rows() != cov.cols()) throw ShapeError("covariance matrix is not square");
  if ((cov - cov.adjoint()).norm() > 1e-12 * std::max(1.0, cov.norm())) {
    throw ParameterError("covariance matrix is not Hermitian");
  }
  Eigen::LLT<ComplexMatrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw ParameterError("covariance matrix is not positive definite");
  }
  NoiseCovariance c(Kind::Full, static_cast<std::size_t>(cov.rows()));
  c.chol_ = llt.matrixL();
  c.full_ = std::move(cov);
  return c;
}

ComplexMatrix NoiseCovariance::dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  switch (kind_) {
    case Kind::Noiseless: return ComplexMatrix::Zero(n, n);
    case Kind::ScaledIdentity: return sigma2_ * ComplexMatrix::Identity(n, n);
    case Kind::Diagonal: return variances_.cast<cplx>().asDiagonal();
    case Kind::Full: return full_;
  }
  return {};
}

void NoiseCovariance::whiten(ComplexMatrix& rows) const {
  if (static_cast<std::size_t>(rows.rows()) != dim_) {
    throw ShapeError("whiten: row count does not match covariance dimension");
  }
  switch (kind_) {
    case Kind::Noiseless: return;
    case Kind::ScaledIdentity: rows /= std::sqrt(sigma2_); return;
    case Kind::Diagonal:
      rows = variances_.cwiseSqrt().cwiseInverse().asDiagonal() * rows;
      return;
    case Kind::Full:
      chol_.triangularView<Eigen::Lower>().solveInPlace(rows);
      return;
  }
}

void NoiseCovariance::whiten(ComplexVector& v) const {
  ComplexMatrix m = v;
  whiten(m);
  v = m.col(0);
}

NoiseCovariance NoiseCovariance::weighted(const RealVector& w) const {
  if (static_cast<std::size_t>(w.size()) != dim_) {
    throw ShapeError("weighted: weight length does not match covariance dimension");
  }
  if ((w.array() == 0.0).any()) {
    throw ParameterError("weighted: zero weights make the covariance singular");
  }
  switch (kind_) {
    case Kind::Noiseless: return noiseless(dim_);
    case Kind::ScaledIdentity: return diagonal(sigma2_ * w.array().square().matrix());
    case Kind::Diagonal: return diagonal(variances_.array() * w.array().square());
    case Kind::Full: {
      const auto wc = w.cast<cplx>();
      ComplexMatrix m = wc.asDiagonal() * full_ * wc.asDiagonal();
      m = 0.5 * (m + m.adjoint()).eval();
      return full(std::move(m));
    }
  }
  return *this;
}

NoiseCovariance NoiseCovariance::select(const std::vector<std::size_t>& rows) const {
  for (std::size_t r : rows) {
    if (r >= dim_) throw ShapeError("select: row index out of range");
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  switch (kind_) {
    case Kind::Noiseless: return noiseless(rows.size());
    case Kind::ScaledIdentity: return scaled_identity(rows.size(), sigma2_);
    case Kind::Diagonal: {
      RealVector v(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        v[i] = variances_[static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])];
      }
      return diagonal(std::move(v));
    }
    case Kind::Full: {
      ComplexMatrix m(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) {
          m(i, j) = full_(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(rows[static_cast<std::size_t>(j)]));
        }
      }
      return full(std::move(m));
    }
  }
  return *this;
}

ComplexVector NoiseCovariance::sample(std::mt19937_64& rng) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  if (kind_ == Kind::Noiseless) return ComplexVector::Zero(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double half = std::sqrt(0.5);
  ComplexVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    z[i] = cplx(half * re, half * im);
  }
  switch (kind_) {
    case Kind::ScaledIdentity: return std::sqrt(sigma2_) * z;
    case Kind::Diagonal: return variances_.cwiseSqrt().cast<cplx>().cwiseProduct(z);
    case Kind::Full: return chol_ * z;
    case Kind::Noiseless: break;
  }
  return z;
}

void write_covariance(std::ostream& out, const NoiseCovariance& cov) {
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(cov.kind()));
  switch (cov.kind()) {
    case NoiseCovariance::Kind::Noiseless: break;
    case NoiseCovariance::Kind::ScaledIdentity: binio::put<double>(out, cov.sigma2()); break;
    case NoiseCovariance::Kind::Diagonal:
      for (Eigen::Index m = 0; m < cov.variances().size(); ++m) {
        binio::put<double>(out, cov.variances()[m]);
      }
      break;
    case NoiseCovariance::Kind::Full: {
      const ComplexMatrix& r = cov.matrix();
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
          binio::put<double>(out, r(i, j).real());
          binio::put<double>(out, r(i, j).imag());
        }
      }
      break;
    }
  }
}

NoiseCovariance read_covariance(binio::Reader& rd, std::size_t dim) {
  const auto tag = rd.get<std::uint32_t>();
  const auto n = static_cast<Eigen::Index>(dim);
  try {
    switch (static_cast<NoiseCovariance::Kind>(tag)) {
      case NoiseCovariance::Kind::Noiseless: return NoiseCovariance::noiseless(dim);
      case NoiseCovariance::Kind::ScaledIdentity:
        return NoiseCovariance::scaled_identity(dim, rd.get<double>());
      case NoiseCovariance::Kind::Diagonal: {
        RealVector v(n);
        for (Eigen::Index m = 0; m < n; ++m) v[m] = rd.get<double>();
        return NoiseCovariance::diagonal(std::move(v));
      }
      case NoiseCovariance::Kind::Full: {
        ComplexMatrix r(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double re = rd.get<double>();
            const double im = rd.get<double>();
            r(i, j) = cplx(re, im);
          }
        }
        return NoiseCovariance::full(std::move(r));
      }
    }
  } catch (const ParameterError& e) {
    rd.fail(std::string("invalid covariance (") + e.what() + ")");
  }
  rd.fail("unknown covariance tag " + std::to_string(tag));
}

}  // namespace edgesar
