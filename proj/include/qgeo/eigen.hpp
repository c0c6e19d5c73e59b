#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>

#include "qgeo/complex_matrix.hpp"
#include "qgeo/errors.hpp"

namespace qgeo {

struct EigenDecomposition {
  std::size_t dim = 0;
  std::array<double, kMaxDim> eigenvalues{};  // ascending
  ComplexMatrix eigenvectors;                 // columns, aligned with eigenvalues

  double min_eigenvalue() const { return eigenvalues[0]; }
  double max_eigenvalue() const { return eigenvalues[dim - 1]; }
};

namespace detail {

inline double offdiagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.dim(); ++p)
    for (std::size_t q = p + 1; q < a.dim(); ++q) s += std::norm(a(p, q));
  return std::sqrt(2.0 * s);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations with a
/// phase factor absorbing the complex off-diagonal entry. Unconditionally
/// stable at the dimensions used here (d <= 8). Stops when the off-diagonal
/// Frobenius norm drops below 1e-13, at most 100 sweeps.
inline EigenDecomposition hermitian_eigen(const ComplexMatrix& h) {
  if (h.dim() == 0) throw RangeError("hermitian_eigen: empty matrix");
  if (h.hermiticity_defect() > 1e-9) {
    throw NotHermitianError("hermitian_eigen: matrix is not Hermitian (defect " +
                            std::to_string(h.hermiticity_defect()) + ")");
  }
  const std::size_t d = h.dim();
  ComplexMatrix a = h.hermitized();
  ComplexMatrix v = ComplexMatrix::identity(d);

  constexpr double kOffTol = 1e-13;
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (detail::offdiagonal_norm(a) < kOffTol) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double r = std::abs(a(p, q));
        if (r <= 1e-300) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const cplx u = a(p, q) / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * r);
        // Smaller-magnitude root of t^2 - 2*tau*t - 1 = 0.
        double t;
        if (std::abs(tau) > 1e150) {
          t = -1.0 / (2.0 * tau);
        } else {
          const double sgn = (tau >= 0.0) ? 1.0 : -1.0;
          t = -sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        a(p, p) = app * c * c + 2.0 * r * c * s + aqq * s * s;
        a(q, q) = app * s * s - 2.0 * r * c * s + aqq * c * c;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          if (k == p || k == q) continue;
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp + s * std::conj(u) * akq;
          a(p, k) = std::conj(a(k, p));
          a(k, q) = -s * u * akp + c * akq;
          a(q, k) = std::conj(a(k, q));
        }
        for (std::size_t k = 0; k < d; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp + s * std::conj(u) * vkq;
          v(k, q) = -s * u * vkp + c * vkq;
        }
      }
    }
  }

  std::array<std::size_t, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + d, std::size_t{0});
  std::stable_sort(order.begin(), order.begin() + d,
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.dim = d;
  out.eigenvectors = ComplexMatrix(d);
  for (std::size_t c = 0; c < d; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]).real();
    for (std::size_t rix = 0; rix < d; ++rix) out.eigenvectors(rix, c) = v(rix, order[c]);
  }
  return out;
}

/// V diag(values) V^dagger, forced exactly Hermitian.
inline ComplexMatrix reconstruct_from_eigen(const EigenDecomposition& e,
                                            std::span<const double> values) {
  const std::size_t d = e.dim;
  ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        s += values[k] * e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
      }
      if (i == j) {
        m(i, i) = s.real();
      } else {
        m(i, j) = s;
        m(j, i) = std::conj(s);
      }
    }
  }
  return m;
}

/// Round-off clamp shared by the PSD-only matrix functions: eigenvalues in
/// [-1e-10, 0) are treated as exact zeros.
inline double clamp_roundoff_negative(double x) {
  return (x < 0.0 && x >= -1e-10) ? 0.0 : x;
}

/// V diag(f(lambda)) V^dagger for a scalar real function f.
template <class Func>
ComplexMatrix matrix_function(const ComplexMatrix& h, Func&& f) {
  const EigenDecomposition e = hermitian_eigen(h);
  std::array<double, kMaxDim> mapped{};
  for (std::size_t i = 0; i < e.dim; ++i) {
    mapped[i] = f(e.eigenvalues[i]);
    if (!std::isfinite(mapped[i])) {
      throw MatrixDomainError("matrix_function: function undefined at eigenvalue " +
                              std::to_string(e.eigenvalues[i]));
    }
  }
  return reconstruct_from_eigen(e, std::span<const double>(mapped.data(), e.dim));
}

inline ComplexMatrix matrix_sqrt(const ComplexMatrix& h) {
  const EigenDecomposition e = hermitian_eigen(h);
  std::array<double, kMaxDim> mapped{};
  for (std::size_t i = 0; i < e.dim; ++i) {
    const double lam = clamp_roundoff_negative(e.eigenvalues[i]);
    if (lam < 0.0) {
      throw MatrixDomainError("matrix_sqrt: negative eigenvalue " +
                              std::to_string(e.eigenvalues[i]));
    }
    mapped[i] = std::sqrt(lam);
  }
  return reconstruct_from_eigen(e, std::span<const double>(mapped.data(), e.dim));
}

inline ComplexMatrix matrix_log(const ComplexMatrix& h) {
  const EigenDecomposition e = hermitian_eigen(h);
  std::array<double, kMaxDim> mapped{};
  for (std::size_t i = 0; i < e.dim; ++i) {
    const double lam = clamp_roundoff_negative(e.eigenvalues[i]);
    if (lam <= 0.0) {
      throw MatrixDomainError("matrix_log: log undefined at eigenvalue " +
                              std::to_string(e.eigenvalues[i]));
    }
    mapped[i] = std::log(lam);
  }
  return reconstruct_from_eigen(e, std::span<const double>(mapped.data(), e.dim));
}

inline cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatchError("trace_of_product: dimensions differ");
  cplx t = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j)
    for (std::size_t k = 0; k < a.dim(); ++k) t += a(j, k) * b(k, j);
  return t;
}

/// Re Tr(AB). For Hermitian A, B the imaginary part is round-off only.
inline double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  return trace_of_product(a, b).real();
}

/// (1/2) sum_i |lambda_i(A - B)|.
inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const EigenDecomposition e = hermitian_eigen((a - b).hermitized());
  double s = 0.0;
  for (std::size_t i = 0; i < e.dim; ++i) s += std::abs(e.eigenvalues[i]);
  return 0.5 * s;
}

}  // namespace qgeo
