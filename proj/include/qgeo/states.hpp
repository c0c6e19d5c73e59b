#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qgeo/complex_matrix.hpp"
#include "qgeo/eigen.hpp"
#include "qgeo/errors.hpp"

namespace qgeo {

inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPurityTol = 1e-9;

/// Cartesian coordinates of a one-qubit state in the Bloch ball,
/// rho = [[(1+z)/2, (x-iy)/2], [(x+iy)/2, (1-z)/2]].
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm_sq() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm_sq()); }
};

inline double dot(const BlochVector& a, const BlochVector& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

struct ValidityReport {
  bool hermitian = false;
  bool unit_trace = false;
  bool psd = false;
  double min_eigenvalue = 0.0;

  bool valid() const { return hermitian && unit_trace && psd; }
};

/// Diagnostic check of the three density-matrix conditions. `tol` bounds the
/// admissible negativity of the smallest eigenvalue.
inline ValidityReport check_state(const ComplexMatrix& h, double tol = kPsdTol) {
  ValidityReport r;
  r.hermitian = h.hermiticity_defect() <= 1e-9;
  r.unit_trace = std::abs(h.trace() - 1.0) <= kTraceTol;
  const EigenDecomposition e = hermitian_eigen(h.hermitized());
  r.min_eigenvalue = e.min_eigenvalue();
  r.psd = r.min_eigenvalue >= -tol;
  return r;
}

/// Hermitian, unit trace, positive semidefinite (all within tolerance).
/// Instances are immutable; construction through `from_matrix` validates,
/// the `_unchecked` variant trusts callers that construct provably valid
/// states (convex mixtures, channel outputs, Bloch points inside the ball).
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const ComplexMatrix& h, double psd_tol = kPsdTol) {
    const ValidityReport r = check_state(h, psd_tol);
    if (!r.valid()) {
      std::string why;
      if (!r.hermitian) why += " not-hermitian";
      if (!r.unit_trace) why += " trace!=1";
      if (!r.psd) why += " min-eigenvalue=" + std::to_string(r.min_eigenvalue);
      throw InvalidStateError("not a density matrix:" + why);
    }
    return DensityMatrix(h.hermitized());
  }

  static DensityMatrix from_matrix_unchecked(const ComplexMatrix& h) {
    return DensityMatrix(h.hermitized());
  }

  std::size_t dim() const { return m_.dim(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  explicit DensityMatrix(const ComplexMatrix& m) : m_(m) {}
  ComplexMatrix m_;
};

inline DensityMatrix maximally_mixed(std::size_t d) {
  ComplexMatrix m = ComplexMatrix::identity(d);
  m *= cplx(1.0 / static_cast<double>(d), 0.0);
  return DensityMatrix::from_matrix_unchecked(m);
}

/// |psi><psi| for a (normalized on entry) ket.
inline DensityMatrix pure_state_from_ket(std::span<const cplx> ket) {
  const std::size_t d = ket.size();
  if (d < 1 || d > kMaxDim) throw RangeError("pure_state_from_ket: bad dimension");
  double n2 = 0.0;
  for (const cplx& c : ket) n2 += std::norm(c);
  if (n2 <= 0.0) throw RangeError("pure_state_from_ket: zero vector");
  const double inv = 1.0 / n2;
  ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = ket[i] * std::conj(ket[j]) * inv;
  return DensityMatrix::from_matrix_unchecked(m);
}

inline DensityMatrix bloch_to_density(const BlochVector& b) {
  if (b.norm() > 1.0 + 1e-10) {
    throw OutsideBallError("Bloch vector norm " + std::to_string(b.norm()) + " exceeds 1");
  }
  ComplexMatrix m(2);
  m(0, 0) = 0.5 * (1.0 + b.z);
  m(0, 1) = cplx(0.5 * b.x, -0.5 * b.y);
  m(1, 0) = cplx(0.5 * b.x, 0.5 * b.y);
  m(1, 1) = 0.5 * (1.0 - b.z);
  return DensityMatrix::from_matrix_unchecked(m);
}

inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw DimensionMismatchError("density_to_bloch: dimension must be 2");
  const ComplexMatrix& m = rho.matrix();
  return BlochVector{2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                     m(0, 0).real() - m(1, 1).real()};
}

/// Real coordinates xi_1..xi_{d^2-1} of a trace-one Hermitian matrix.
/// Layout: the first d-1 entries parameterize the diagonal, with the last
/// diagonal entry fixed by the unit trace; then (real, imaginary) pairs for
/// the upper-triangle entries in row-major order, so (xi_d, xi_{d+1}) sits
/// at entry (1,2).
struct XiVector {
  std::size_t dim = 0;
  std::vector<double> values;
};

namespace detail {
inline void check_xi(const XiVector& xi) {
  if (xi.dim < 2 || xi.dim > kMaxDim) throw RangeError("xi vector: bad dimension");
  if (xi.values.size() != xi.dim * xi.dim - 1) {
    throw LengthMismatchError("xi vector: expected " + std::to_string(xi.dim * xi.dim - 1) +
                              " coordinates, got " + std::to_string(xi.values.size()));
  }
}
}  // namespace detail

/// Hermitian with trace exactly one; not necessarily positive semidefinite.
inline ComplexMatrix xi_to_matrix(const XiVector& xi) {
  detail::check_xi(xi);
  const std::size_t d = xi.dim;
  const double dd = static_cast<double>(d);
  ComplexMatrix m(d);
  double diag_sum = 0.0;
  for (std::size_t i = 0; i + 1 < d; ++i) {
    m(i, i) = (xi.values[i] + 1.0) / dd;
    diag_sum += xi.values[i];
  }
  m(d - 1, d - 1) = (1.0 - diag_sum) / dd;
  std::size_t idx = d - 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double re = xi.values[idx];
      const double im = xi.values[idx + 1];
      idx += 2;
      m(i, j) = cplx(0.5 * re, -0.5 * im);
      m(j, i) = cplx(0.5 * re, 0.5 * im);
    }
  }
  return m;
}

inline XiVector matrix_to_xi(const ComplexMatrix& h) {
  if (std::abs(h.trace() - 1.0) > kTraceTol) {
    throw TraceNotOneError("matrix_to_xi: trace is " + std::to_string(h.trace().real()));
  }
  const std::size_t d = h.dim();
  const double dd = static_cast<double>(d);
  XiVector xi;
  xi.dim = d;
  xi.values.assign(d * d - 1, 0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) xi.values[i] = dd * h(i, i).real() - 1.0;
  std::size_t idx = d - 1;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      xi.values[idx] = 2.0 * h(i, j).real();
      xi.values[idx + 1] = -2.0 * h(i, j).imag();
      idx += 2;
    }
  }
  return xi;
}

inline XiVector state_to_xi(const DensityMatrix& rho) { return matrix_to_xi(rho.matrix()); }

/// Tr rho^2.
inline double purity(const DensityMatrix& rho) {
  return trace_product(rho.matrix(), rho.matrix());
}

inline bool is_pure(const DensityMatrix& rho, double tol = kPurityTol) {
  return purity(rho) >= 1.0 - tol;
}

/// r*rho + (1-r)*I/d. For d=2 this scales the Bloch vector by r.
inline DensityMatrix shrink_toward_center(const DensityMatrix& rho, double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw RangeError("shrink_toward_center: r must lie in [0,1], got " + std::to_string(r));
  }
  const std::size_t d = rho.dim();
  ComplexMatrix m = rho.matrix();
  m *= cplx(r, 0.0);
  const double off = (1.0 - r) / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) += off;
  return DensityMatrix::from_matrix_unchecked(m);
}

}  // namespace qgeo
