#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qgeo/complex_matrix.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard and the double conversions below avoid the
/// implementation-defined std::*_distribution, so streams are reproducible
/// across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cplx complex_normal() {
    const double re = normal();
    const double im = normal();
    return cplx(re, im);
  }

  BlochVector unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return BlochVector{r * std::cos(phi), r * std::sin(phi), z};
  }

  /// Haar-random pure state of dimension d.
  DensityMatrix haar_pure(std::size_t d) {
    std::array<cplx, kMaxDim> ket{};
    for (std::size_t i = 0; i < d; ++i) ket[i] = complex_normal();
    return pure_state_from_ket(std::span<const cplx>(ket.data(), d));
  }

  /// Full-rank-in-practice random mixed state, G G^dagger normalized.
  DensityMatrix random_density(std::size_t d) {
    ComplexMatrix g(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) g(i, j) = complex_normal();
    ComplexMatrix w = (g * g.adjoint()).hermitized();
    w *= cplx(1.0 / w.trace().real(), 0.0);
    return DensityMatrix::from_matrix_unchecked(w);
  }

  ComplexMatrix random_hermitian(std::size_t d, double scale = 1.0) {
    ComplexMatrix h(d);
    for (std::size_t i = 0; i < d; ++i) {
      h(i, i) = scale * normal();
      for (std::size_t j = i + 1; j < d; ++j) {
        const cplx v = 0.5 * scale * complex_normal();
        h(i, j) = v;
        h(j, i) = std::conj(v);
      }
    }
    return h;
  }

  /// Haar-like random unitary: Gram-Schmidt on a Gaussian matrix.
  ComplexMatrix random_unitary(std::size_t d) {
    ComplexMatrix g(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) g(i, j) = complex_normal();
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        cplx proj = 0.0;
        for (std::size_t r = 0; r < d; ++r) proj += std::conj(g(r, prev)) * g(r, c);
        for (std::size_t r = 0; r < d; ++r) g(r, c) -= proj * g(r, prev);
      }
      double n2 = 0.0;
      for (std::size_t r = 0; r < d; ++r) n2 += std::norm(g(r, c));
      const double inv = 1.0 / std::sqrt(n2);
      for (std::size_t r = 0; r < d; ++r) g(r, c) *= inv;
    }
    return g;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qgeo
