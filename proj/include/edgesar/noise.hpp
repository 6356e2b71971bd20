#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "edgesar/binary_io.hpp"
#include "edgesar/types.hpp"

namespace edgesar {

/// Covariance R of the additive measurement noise on one pulse.
///
/// Kinds other than Noiseless are positive definite by construction. The
/// Noiseless tag exists so simulation can skip noise; for weighting purposes
/// it behaves as the identity (unit whitening).
class NoiseCovariance {
 public:
  enum class Kind : std::uint32_t { Noiseless = 0, ScaledIdentity = 1, Diagonal = 2, Full = 3 };

  static NoiseCovariance noiseless(std::size_t dim);
  static NoiseCovariance scaled_identity(std::size_t dim, double sigma2);
  static NoiseCovariance diagonal(RealVector variances);
  /// Hermitian positive-definite matrix; rejected if a Cholesky factorization fails.
  static NoiseCovariance full(ComplexMatrix cov);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double sigma2() const { return sigma2_; }
  const RealVector& variances() const { return variances_; }
  const ComplexMatrix& matrix() const { return full_; }
  ComplexMatrix dense() const;

  /// Applies R^{-1/2} in place (L^{-1} with R = L L^H for the full form), so that
  /// (Wx)^H (Wy) = x^H R^{-1} y. Uses a triangular solve, never an explicit inverse.
  void whiten(ComplexMatrix& rows) const;
  void whiten(ComplexVector& v) const;

  /// Covariance of diag(w) x when x has covariance R: diag(w) R diag(w)^H.
  /// Every weight must be nonzero.
  NoiseCovariance weighted(const RealVector& w) const;
  /// Restriction to the given sample indices.
  NoiseCovariance select(const std::vector<std::size_t>& rows) const;

  /// One draw of circularly-symmetric complex Gaussian noise with this covariance.
  ComplexVector sample(std::mt19937_64& rng) const;

 private:
  NoiseCovariance(Kind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  std::size_t dim_;
  double sigma2_ = 1.0;
  RealVector variances_;
  ComplexMatrix full_;
  ComplexMatrix chol_;  // lower factor for the full form
};

/// u32 kind tag, then none | f64 sigma2 | dim f64 variances | dim*dim
/// (f64 re, f64 im) column-major.
void write_covariance(std::ostream& out, const NoiseCovariance& cov);
NoiseCovariance read_covariance(binio::Reader& rd, std::size_t dim);

}  // namespace edgesar
