#pragma once

#include <vector>

#include "qgeo/capacity.hpp"
#include "qgeo/complex_matrix.hpp"
#include "qgeo/random.hpp"
#include "qgeo/states.hpp"

namespace qgeo::test {

/// U rho U^dagger.
inline DensityMatrix conjugate(const DensityMatrix& rho, const ComplexMatrix& u) {
  return DensityMatrix::from_matrix_unchecked((u * rho.matrix() * u.adjoint()).hermitized());
}

/// Random CPTP qubit channel: Gaussian Kraus pair normalized so that
/// sum K^dagger K = I (K_i = G_i T^{-1/2}).
inline QubitChannel random_channel(Rng& rng, std::size_t n_kraus = 2) {
  std::vector<ComplexMatrix> g;
  for (std::size_t i = 0; i < n_kraus; ++i) {
    ComplexMatrix k(2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) k(r, c) = rng.complex_normal();
    g.push_back(k);
  }
  ComplexMatrix t(2);
  for (const ComplexMatrix& k : g) t += k.adjoint() * k;
  const EigenDecomposition e = hermitian_eigen(t.hermitized());
  std::array<double, kMaxDim> inv_sqrt{};
  for (std::size_t i = 0; i < e.dim; ++i) inv_sqrt[i] = 1.0 / std::sqrt(e.eigenvalues[i]);
  const ComplexMatrix tinv =
      reconstruct_from_eigen(e, std::span<const double>(inv_sqrt.data(), e.dim));
  std::vector<ComplexMatrix> kraus;
  for (const ComplexMatrix& k : g) kraus.push_back(k * tinv);
  return QubitChannel::from_kraus(kraus);
}

}  // namespace qgeo::test
