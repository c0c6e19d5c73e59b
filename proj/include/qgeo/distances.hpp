#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "qgeo/eigen.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

/// The distance-like functions used for Voronoi labelings. `Divergence`
/// labels a query sigma by D(sigma || rho_site); `DivergenceDual` by
/// D(rho_site || sigma).
enum class DistanceKind {
  FubiniStudy,
  BuresPure,
  Bures,
  Divergence,
  DivergenceDual,
  EuclideanXi,
  GeodesicSphere,
};

inline const char* to_string(DistanceKind k) {
  switch (k) {
    case DistanceKind::FubiniStudy: return "fs";
    case DistanceKind::BuresPure: return "bures_pure";
    case DistanceKind::Bures: return "bures";
    case DistanceKind::Divergence: return "div";
    case DistanceKind::DivergenceDual: return "divdual";
    case DistanceKind::EuclideanXi: return "euclid";
    case DistanceKind::GeodesicSphere: return "geodesic";
  }
  return "?";
}

inline DistanceKind parse_distance_kind(const std::string& s) {
  if (s == "fs") return DistanceKind::FubiniStudy;
  if (s == "bures_pure") return DistanceKind::BuresPure;
  if (s == "bures") return DistanceKind::Bures;
  if (s == "div") return DistanceKind::Divergence;
  if (s == "divdual") return DistanceKind::DivergenceDual;
  if (s == "euclid") return DistanceKind::EuclideanXi;
  if (s == "geodesic") return DistanceKind::GeodesicSphere;
  throw ParseError("unknown distance kind: " + s);
}

namespace detail {

/// Clamp to [0,1]; values outside by more than 1e-8 are rejected.
inline double clamp_unit(double v, const char* what) {
  if (v < -1e-8 || v > 1.0 + 1e-8) {
    throw MatrixDomainError(std::string(what) + " outside [0,1]: " + std::to_string(v));
  }
  return std::min(1.0, std::max(0.0, v));
}

inline void require_pure(const DensityMatrix& s, const char* what) {
  if (!is_pure(s)) throw NotPureError(std::string(what) + ": state is not pure");
}

}  // namespace detail

/// arccos sqrt(Tr rho sigma), pure states only. Radians in [0, pi/2].
inline double fubini_study(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_pure(rho, "fubini_study");
  detail::require_pure(sigma, "fubini_study");
  const double t = detail::clamp_unit(trace_product(rho.matrix(), sigma.matrix()),
                                      "fubini_study overlap");
  return std::acos(std::sqrt(t));
}

/// sqrt(1 - Tr rho sigma), pure states only. Values in [0, 1].
inline double bures_pure(const DensityMatrix& rho, const DensityMatrix& sigma) {
  detail::require_pure(rho, "bures_pure");
  detail::require_pure(sigma, "bures_pure");
  const double t = detail::clamp_unit(trace_product(rho.matrix(), sigma.matrix()),
                                      "bures_pure overlap");
  return std::sqrt(1.0 - t);
}

namespace detail {

/// Tr sqrt(S rho S) for S = sqrt(sigma), given S. Eigenvalues below 1e-13
/// are zeroed before the square root: the sandwich spectrum is exact-zero
/// there up to round-off, and sqrt would amplify that noise to ~1e-8,
/// breaking the symmetry guarantee at rank-deficient inputs.
inline double tr_sqrt_sandwich(const ComplexMatrix& sqrt_sigma, const ComplexMatrix& rho) {
  const ComplexMatrix inner = (sqrt_sigma * rho * sqrt_sigma).hermitized();
  const EigenDecomposition e = hermitian_eigen(inner);
  double s = 0.0;
  for (std::size_t i = 0; i < e.dim; ++i) {
    const double lam = e.eigenvalues[i];
    if (lam < -1e-10) {
      throw MatrixDomainError("bures: sandwich matrix has negative eigenvalue " +
                              std::to_string(lam));
    }
    if (lam > 1e-13) s += std::sqrt(lam);
  }
  return s;
}

inline double bures_from_sqrts(const ComplexMatrix& sqrt_rho, const ComplexMatrix& rho,
                               const ComplexMatrix& sqrt_sigma, const ComplexMatrix& sigma) {
  const double a = tr_sqrt_sandwich(sqrt_sigma, rho);
  const double b = tr_sqrt_sandwich(sqrt_rho, sigma);
  if (std::abs(a - b) > 1e-10) {
    throw Error("bures: symmetry check failed, |" + std::to_string(a) + " - " +
                std::to_string(b) + "| > 1e-10");
  }
  return std::sqrt(1.0 - clamp_unit(a, "bures fidelity"));
}

}  // namespace detail

/// sqrt(1 - Tr sqrt(sqrt(sigma) rho sqrt(sigma))), any ranks. The result is
/// evaluated in both argument orders and checked symmetric within 1e-10.
inline double bures(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionMismatchError("bures: dimensions differ");
  return detail::bures_from_sqrts(matrix_sqrt(rho.matrix()), rho.matrix(),
                                  matrix_sqrt(sigma.matrix()), sigma.matrix());
}

/// sum_i lambda_i log lambda_i over the eigenvalues of rho (equals -S(rho)),
/// with 0 log 0 = 0.
inline double state_neg_entropy(const DensityMatrix& rho) {
  const EigenDecomposition e = hermitian_eigen(rho.matrix());
  double s = 0.0;
  for (std::size_t i = 0; i < e.dim; ++i) {
    const double lam = clamp_roundoff_negative(e.eigenvalues[i]);
    if (lam > 0.0) s += lam * std::log(lam);
  }
  return s;
}

inline double von_neumann_entropy(const DensityMatrix& rho) { return -state_neg_entropy(rho); }

inline constexpr double kFullRankEig = 1e-12;

/// log rho; requires min eigenvalue > 1e-12 (full rank).
inline ComplexMatrix density_log(const DensityMatrix& rho) {
  const EigenDecomposition e = hermitian_eigen(rho.matrix());
  if (e.min_eigenvalue() <= kFullRankEig) {
    throw SingularSecondArgumentError("divergence: second argument is rank-deficient (min "
                                      "eigenvalue " + std::to_string(e.min_eigenvalue()) + ")");
  }
  std::array<double, kMaxDim> mapped{};
  for (std::size_t i = 0; i < e.dim; ++i) mapped[i] = std::log(e.eigenvalues[i]);
  return reconstruct_from_eigen(e, std::span<const double>(mapped.data(), e.dim));
}

/// D given precomputed pieces: sum lambda log lambda of sigma, and log rho.
inline double divergence_from_parts(double neg_entropy_sigma, const ComplexMatrix& sigma,
                                    const ComplexMatrix& log_rho) {
  return neg_entropy_sigma - trace_product(sigma, log_rho);
}

/// Quantum divergence D(sigma || rho) = Tr sigma (log sigma - log rho) in
/// nats. sigma may be rank-deficient (0 log 0 = 0); rho must be full rank.
/// Tr(sigma log rho) is evaluated in rho's eigenbasis, so no matrix log of
/// sigma is ever formed.
inline double divergence(const DensityMatrix& sigma, const DensityMatrix& rho) {
  if (sigma.dim() != rho.dim()) throw DimensionMismatchError("divergence: dimensions differ");
  return divergence_from_parts(state_neg_entropy(sigma), sigma.matrix(), density_log(rho));
}

/// Squared Euclidean distance in xi coordinates. Ordering-equivalent to the
/// true Euclidean distance.
inline double euclidean_sq(const XiVector& a, const XiVector& b) {
  if (a.dim != b.dim || a.values.size() != b.values.size()) {
    throw DimensionMismatchError("euclidean_sq: coordinate dimensions differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    s += d * d;
  }
  return s;
}

/// arccos(a . b) for unit vectors. Radians in [0, pi].
inline double geodesic_sphere(const BlochVector& a, const BlochVector& b) {
  if (std::abs(a.norm() - 1.0) > 1e-9 || std::abs(b.norm() - 1.0) > 1e-9) {
    throw NotOnSphereError("geodesic_sphere: arguments must be unit vectors");
  }
  const double c = std::min(1.0, std::max(-1.0, dot(a, b)));
  return std::acos(c);
}

/// Helper shared by tests and site-set validation.
inline double state_trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

}  // namespace qgeo
