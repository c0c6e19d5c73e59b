#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>

#include "qgeo/errors.hpp"

namespace qgeo {

using cplx = std::complex<double>;

/// Everything in this library runs on density matrices of dimension <= 8;
/// the largest matrix ever formed is the 4x4 Choi matrix of a qubit channel
/// embedded in the same storage.
inline constexpr std::size_t kMaxDim = 8;

/// Dense square complex matrix with value semantics and fixed-capacity
/// storage (no allocation). Row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) {
      throw RangeError("matrix dimension must be in [1, " + std::to_string(kMaxDim) +
                       "], got " + std::to_string(dim));
    }
  }

  ComplexMatrix(std::size_t dim, std::initializer_list<cplx> row_major) : ComplexMatrix(dim) {
    if (row_major.size() != dim * dim) {
      throw DimensionMismatchError("initializer list size does not match matrix dimension");
    }
    std::size_t i = 0;
    for (const cplx& v : row_major) entries_[i++] = v;
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t dim() const { return dim_; }

  cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) entries_[i] += o.entries_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < dim_ * dim_; ++i) entries_[i] -= o.entries_[i];
    return *this;
  }

  ComplexMatrix& operator*=(cplx s) {
    for (std::size_t i = 0; i < dim_ * dim_; ++i) entries_[i] *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.require_same_dim(b);
    const std::size_t d = a.dim_;
    ComplexMatrix c(d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_ * dim_; ++i) s += std::norm(entries_[i]);
    return std::sqrt(s);
  }

  /// Largest |a_ij - conj(a_ji)| over all entries.
  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i; j < dim_; ++j) {
        worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
      }
    }
    return worst;
  }

  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

  /// (A + A^dagger)/2 with exactly real diagonal.
  ComplexMatrix hermitized() const {
    ComplexMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      m(i, i) = (*this)(i, i).real();
      for (std::size_t j = i + 1; j < dim_; ++j) {
        const cplx v = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        m(i, j) = v;
        m(j, i) = std::conj(v);
      }
    }
    return m;
  }

 private:
  void require_same_dim(const ComplexMatrix& o) const {
    if (dim_ != o.dim_) {
      throw DimensionMismatchError("matrix dimensions differ: " + std::to_string(dim_) +
                                   " vs " + std::to_string(o.dim_));
    }
  }

  std::size_t dim_ = 0;
  std::array<cplx, kMaxDim * kMaxDim> entries_{};
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatchError("max_abs_diff: dimensions differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

}  // namespace qgeo
