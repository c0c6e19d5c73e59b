#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "qgeo/eigen.hpp"
#include "qgeo/random.hpp"
#include "helpers.hpp"

using namespace qgeo;

namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace

TEST_CASE("hermitian_eigen on small known matrices", "[linalg]") {
  SECTION("identity") {
    const auto e = hermitian_eigen(ComplexMatrix::identity(2));
    CHECK(e.eigenvalues[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(e.eigenvalues[1] == Catch::Approx(1.0).margin(1e-14));
  }
  SECTION("diag(0,1)") {
    const ComplexMatrix m(2, {0, 0, 0, 1});
    const auto e = hermitian_eigen(m);
    CHECK(e.eigenvalues[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(e.eigenvalues[1] == Catch::Approx(1.0).margin(1e-14));
    CHECK(std::abs(e.eigenvectors(0, 0)) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(e.eigenvectors(1, 1)) == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("Pauli X has eigenvalues -1, +1") {
    const ComplexMatrix x(2, {0, 1, 1, 0});
    const auto e = hermitian_eigen(x);
    CHECK(e.eigenvalues[0] == Catch::Approx(-1.0).margin(1e-13));
    CHECK(e.eigenvalues[1] == Catch::Approx(1.0).margin(1e-13));
  }
  SECTION("non-Hermitian input is rejected") {
    const ComplexMatrix bad(2, {0, 1, 2, 0});
    CHECK_THROWS_AS(hermitian_eigen(bad), NotHermitianError);
  }
}

TEST_CASE("hermitian_eigen reconstructs and matches an independent solver", "[linalg]") {
  Rng rng(1234);
  for (std::size_t d = 2; d <= 8; ++d) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexMatrix h = rng.random_hermitian(d);
      const auto e = hermitian_eigen(h);

      // reconstruction V diag(lambda) V^dagger
      std::array<double, kMaxDim> lam{};
      for (std::size_t i = 0; i < d; ++i) lam[i] = e.eigenvalues[i];
      const ComplexMatrix rec =
          reconstruct_from_eigen(e, std::span<const double>(lam.data(), d));
      CHECK(max_abs_diff(rec, h.hermitized()) < 1e-10);

      // orthonormal columns
      const ComplexMatrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
      CHECK(max_abs_diff(gram, ComplexMatrix::identity(d)) < 1e-10);

      // ascending order
      for (std::size_t i = 0; i + 1 < d; ++i) CHECK(e.eigenvalues[i] <= e.eigenvalues[i + 1]);

      // eigenvalues against Eigen's solver
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(to_eigen(h.hermitized()));
      for (std::size_t i = 0; i < d; ++i) {
        CHECK(e.eigenvalues[i] == Catch::Approx(ref.eigenvalues()(i)).margin(1e-10));
      }
    }
  }
}

TEST_CASE("matrix_function", "[linalg]") {
  SECTION("sqrt of diag(4,9)") {
    const ComplexMatrix m(2, {4, 0, 0, 9});
    const ComplexMatrix s = matrix_sqrt(m);
    CHECK(s(0, 0).real() == Catch::Approx(2.0).margin(1e-12));
    CHECK(s(1, 1).real() == Catch::Approx(3.0).margin(1e-12));
    CHECK(std::abs(s(0, 1)) < 1e-12);
  }
  SECTION("log of identity(3) is zero") {
    const ComplexMatrix l = matrix_log(ComplexMatrix::identity(3));
    CHECK(l.frobenius_norm() < 1e-12);
  }
  SECTION("sqrt of a rank-1 projector is itself") {
    const ComplexMatrix p(2, {0.5, 0.5, 0.5, 0.5});
    CHECK(max_abs_diff(matrix_sqrt(p), p) < 1e-12);
  }
  SECTION("identity function reproduces the input") {
    Rng rng(5);
    const ComplexMatrix h = rng.random_hermitian(4);
    CHECK(max_abs_diff(matrix_function(h, [](double x) { return x; }), h.hermitized()) < 1e-12);
  }
  SECTION("sqrt then square reproduces a PSD matrix") {
    Rng rng(6);
    const ComplexMatrix g = rng.random_hermitian(3);
    const ComplexMatrix psd = (g * g).hermitized();
    const ComplexMatrix root = matrix_sqrt(psd);
    CHECK(max_abs_diff((root * root).hermitized(), psd) < 1e-9);
  }
  SECTION("domain errors") {
    const ComplexMatrix neg(2, {1, 0, 0, -1});
    CHECK_THROWS_AS(matrix_sqrt(neg), MatrixDomainError);
    const ComplexMatrix sing(2, {1, 0, 0, 0});
    CHECK_THROWS_AS(matrix_log(sing), MatrixDomainError);
    CHECK_THROWS_AS(matrix_function(neg, [](double x) { return std::log(x); }),
                    MatrixDomainError);
  }
  SECTION("eigenvalues in [-1e-10, 0) are clamped before sqrt") {
    const ComplexMatrix tiny(2, {1, 0, 0, -5e-11});
    CHECK_NOTHROW(matrix_sqrt(tiny));
  }
}

TEST_CASE("trace_product", "[linalg]") {
  SECTION("identity pair") {
    CHECK(trace_product(ComplexMatrix::identity(2), ComplexMatrix::identity(2)) ==
          Catch::Approx(2.0));
  }
  SECTION("orthogonal projectors") {
    const ComplexMatrix a(2, {1, 0, 0, 0});
    const ComplexMatrix b(2, {0, 0, 0, 1});
    CHECK(trace_product(a, b) == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("Bloch z+ against x+ gives 1/2") {
    const DensityMatrix zp = bloch_to_density(BlochVector{0, 0, 1});
    const DensityMatrix xp = bloch_to_density(BlochVector{1, 0, 0});
    CHECK(trace_product(zp.matrix(), xp.matrix()) == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("symmetric with negligible imaginary part on random Hermitian pairs") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
      const ComplexMatrix a = rng.random_hermitian(4);
      const ComplexMatrix b = rng.random_hermitian(4);
      CHECK(std::abs(trace_product(a, b) - trace_product(b, a)) < 1e-12);
      CHECK(std::abs(trace_of_product(a, b).imag()) < 1e-10);
    }
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(trace_product(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
                    DimensionMismatchError);
  }
}

TEST_CASE("trace_distance", "[linalg]") {
  const ComplexMatrix a(2, {1, 0, 0, 0});
  const ComplexMatrix b(2, {0, 0, 0, 1});
  CHECK(trace_distance(a, b) == Catch::Approx(1.0).margin(1e-12));
  CHECK(trace_distance(a, a) == Catch::Approx(0.0).margin(1e-14));
}
