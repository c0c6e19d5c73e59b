#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "qgeo/capacity.hpp"
#include "helpers.hpp"

using namespace qgeo;

namespace {

double binary_entropy_nats(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

double depolarizing_capacity_nats(double r) {
  return std::numbers::ln2 - binary_entropy_nats((1 + r) / 2);
}

Mat3 rotation_z(double angle) {
  Mat3 o = Mat3::identity();
  o(0, 0) = std::cos(angle);
  o(0, 1) = -std::sin(angle);
  o(1, 0) = std::sin(angle);
  o(1, 1) = std::cos(angle);
  return o;
}

QubitChannel amplitude_damping(double gamma) {
  const ComplexMatrix k0(2, {1, 0, 0, std::sqrt(1 - gamma)});
  const ComplexMatrix k1(2, {0, std::sqrt(gamma), 0, 0});
  return QubitChannel::from_kraus({k0, k1});
}

}  // namespace

TEST_CASE("channel construction and Choi validation", "[capacity]") {
  SECTION("identity channel is valid") {
    CHECK_NOTHROW(QubitChannel::from_affine(Mat3::identity(), BlochVector{}));
  }
  SECTION("fully depolarizing channel is valid") {
    CHECK_NOTHROW(QubitChannel::from_affine(Mat3::scale(0.0), BlochVector{}));
  }
  SECTION("Bloch-ball expansion is rejected") {
    CHECK_THROWS_AS(QubitChannel::from_affine(Mat3::scale(1.2), BlochVector{}),
                    NotCompletelyPositiveError);
  }
  SECTION("Choi of the identity channel is rank one with trace 2") {
    const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
    const EigenDecomposition e = hermitian_eigen(id.choi());
    CHECK(e.eigenvalues[3] == Catch::Approx(2.0).margin(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e.eigenvalues[i]) < 1e-12);
  }
  SECTION("Choi of the fully depolarizing channel has all eigenvalues 1/2") {
    const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.0), BlochVector{});
    const EigenDecomposition e = hermitian_eigen(dep.choi());
    for (int i = 0; i < 4; ++i) CHECK(e.eigenvalues[i] == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("depolarizing Choi spectrum {(1+3r)/2, (1-r)/2 x3}") {
    for (double r : {0.25, 0.5, 0.9}) {
      const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(r), BlochVector{});
      const EigenDecomposition e = hermitian_eigen(dep.choi());
      CHECK(e.eigenvalues[3] == Catch::Approx((1 + 3 * r) / 2).margin(1e-12));
      for (int i = 0; i < 3; ++i)
        CHECK(e.eigenvalues[i] == Catch::Approx((1 - r) / 2).margin(1e-12));
    }
  }
}

TEST_CASE("Kraus input", "[capacity]") {
  SECTION("amplitude damping converts to the known affine form") {
    const double gamma = 0.3;
    const QubitChannel ch = amplitude_damping(gamma);
    const Mat3& m = ch.linear_part();
    CHECK(m(0, 0) == Catch::Approx(std::sqrt(1 - gamma)).margin(1e-12));
    CHECK(m(1, 1) == Catch::Approx(std::sqrt(1 - gamma)).margin(1e-12));
    CHECK(m(2, 2) == Catch::Approx(1 - gamma).margin(1e-12));
    CHECK(std::abs(m(0, 1)) < 1e-12);
    CHECK(ch.offset().z == Catch::Approx(gamma).margin(1e-12));
    CHECK(std::abs(ch.offset().x) < 1e-12);
  }
  SECTION("non-trace-preserving Kraus set is rejected") {
    const ComplexMatrix half(2, {0.5, 0, 0, 0.5});
    CHECK_THROWS_AS(QubitChannel::from_kraus({half}), NotTracePreservingError);
  }
}

TEST_CASE("channel application", "[capacity]") {
  const DensityMatrix rho = bloch_to_density(BlochVector{0.3, 0.4, 0.5});
  SECTION("identity leaves states unchanged") {
    const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
    CHECK(max_abs_diff(id.apply(rho).matrix(), rho.matrix()) < 1e-14);
  }
  SECTION("fully depolarizing maps everything to I/2") {
    const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.0), BlochVector{});
    CHECK(max_abs_diff(dep.apply(rho).matrix(), maximally_mixed(2).matrix()) < 1e-14);
  }
  SECTION("dimension check") {
    const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
    CHECK_THROWS_AS(id.apply(maximally_mixed(3)), DimensionMismatchError);
  }
}

TEST_CASE("divergence_radius", "[capacity]") {
  SECTION("all points at the center") {
    const DensityMatrix c = maximally_mixed(2);
    const auto [radius, idx] = divergence_radius({c, c, c}, c);
    CHECK(radius == Catch::Approx(0.0).margin(1e-12));
    CHECK(idx == 0);
  }
  SECTION("pure points around I/2 sit at log 2, lowest index wins the tie") {
    std::vector<DensityMatrix> pts{bloch_to_density(BlochVector{0, 0, 1}),
                                   bloch_to_density(BlochVector{1, 0, 0})};
    const auto [radius, idx] = divergence_radius(pts, maximally_mixed(2));
    CHECK(radius == Catch::Approx(std::numbers::ln2).margin(1e-10));
    CHECK(idx == 0);
  }
  SECTION("two diagonal points against a diagonal center, brute force") {
    const DensityMatrix a = DensityMatrix::from_matrix(ComplexMatrix(2, {0.9, 0, 0, 0.1}));
    const DensityMatrix b = DensityMatrix::from_matrix(ComplexMatrix(2, {0.3, 0, 0, 0.7}));
    const DensityMatrix c = DensityMatrix::from_matrix(ComplexMatrix(2, {0.6, 0, 0, 0.4}));
    const auto [radius, idx] = divergence_radius({a, b}, c);
    const double da = divergence(a, c);
    const double db = divergence(b, c);
    CHECK(radius == Catch::Approx(std::max(da, db)).margin(1e-12));
    CHECK(idx == (da >= db ? 0u : 1u));
  }
  SECTION("rank-deficient center is rejected") {
    CHECK_THROWS_AS(
        divergence_radius({maximally_mixed(2)}, bloch_to_density(BlochVector{0, 0, 1})),
        SingularSecondArgumentError);
  }
}

TEST_CASE("capacity of reference channels", "[capacity]") {
  SECTION("identity channel: log 2 nats") {
    const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
    const CapacityEstimate est = estimate_capacity_seb(id, 1000);
    CHECK(est.radius_nats == Catch::Approx(std::numbers::ln2).margin(1e-3));
    // reported radius is the enclosing radius of the returned center
    std::vector<DensityMatrix> images;
    for (const BlochVector& b : fibonacci_sphere(1000))
      images.push_back(id.apply(bloch_to_density(b)));
    const auto [max_d, idx] = divergence_radius(images, est.center);
    CHECK(std::abs(max_d - est.radius_nats) < std::max(est.residual, 1e-12));
  }
  SECTION("fully depolarizing: zero") {
    const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.0), BlochVector{});
    const CapacityEstimate est = estimate_capacity_seb(dep, 500);
    CHECK(est.radius_nats < 1e-9);
  }
  SECTION("depolarizing r=0.5: analytic value") {
    const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.5), BlochVector{});
    const CapacityEstimate est = estimate_capacity_seb(dep, 1000);
    CHECK(est.radius_nats == Catch::Approx(0.130812).margin(1e-3));
    CHECK(est.radius_nats ==
          Catch::Approx(depolarizing_capacity_nats(0.5)).margin(1e-3));
  }
}

TEST_CASE("Blahut-Arimoto oracle", "[capacity]") {
  SECTION("two identical points") {
    const DensityMatrix p = bloch_to_density(BlochVector{0, 0, 0.5});
    const CapacityEstimate est = estimate_capacity_ba({p, p});
    CHECK(est.radius_nats < 1e-9);
  }
  SECTION("two orthogonal pure states: log 2 at weights (1/2, 1/2)") {
    const CapacityEstimate est = estimate_capacity_ba(
        {bloch_to_density(BlochVector{0, 0, 1}), bloch_to_density(BlochVector{0, 0, -1})},
        100000, 1e-9);
    CHECK(est.radius_nats == Catch::Approx(std::numbers::ln2).margin(1e-6));
    REQUIRE(est.support_weights.size() == 2);
    CHECK(est.support_weights[0] == Catch::Approx(0.5).margin(1e-6));
    CHECK(est.support_weights[1] == Catch::Approx(0.5).margin(1e-6));
  }
  SECTION("agrees with the farthest-point solver on the depolarizing image") {
    const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.5), BlochVector{});
    std::vector<DensityMatrix> images;
    for (const BlochVector& b : fibonacci_sphere(1000))
      images.push_back(dep.apply(bloch_to_density(b)));
    const CapacityEstimate seb = solve_divergence_seb(images);
    const CapacityEstimate ba = estimate_capacity_ba(images);
    CHECK(std::abs(seb.radius_nats - ba.radius_nats) < 2e-4);
  }
  SECTION("the BA objective equals S(sum w p) - sum w S(p) at the optimum") {
    // two antipodal pure states carry the whole support; interior points
    // lose their weight exponentially, so the reported ensemble is the
    // maximizer and its Holevo quantity must reproduce the radius
    std::vector<DensityMatrix> pts{
        bloch_to_density(BlochVector{0, 0, 1}), bloch_to_density(BlochVector{0, 0, -1}),
        bloch_to_density(BlochVector{0.2, 0.1, 0}), bloch_to_density(BlochVector{0, 0.3, 0.2}),
        maximally_mixed(2)};
    const CapacityEstimate est = estimate_capacity_ba(pts, 100000, 1e-8);
    ComplexMatrix mix(2);
    double mean_entropy = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      mix += pts[i].matrix() * cplx(est.support_weights[i], 0.0);
      mean_entropy += est.support_weights[i] * von_neumann_entropy(pts[i]);
    }
    const double holevo =
        von_neumann_entropy(DensityMatrix::from_matrix_unchecked(mix)) - mean_entropy;
    CHECK(est.radius_nats == Catch::Approx(std::numbers::ln2).margin(1e-6));
    CHECK(est.radius_nats == Catch::Approx(holevo).margin(1e-6));
  }
}

TEST_CASE("literal minimax formula composes divergence with the channel", "[capacity]") {
  // the capacity objective evaluates D(Gamma(sigma) || Gamma(rho)) at fixed
  // argument pairs; for the identity channel it reduces to D(sigma || rho),
  // and a depolarizing channel contracts both arguments' Bloch vectors
  const DensityMatrix sigma = bloch_to_density(BlochVector{0, 0, 0.8});
  const DensityMatrix rho = bloch_to_density(BlochVector{0.3, 0, 0});
  const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
  CHECK(divergence(id.apply(sigma), id.apply(rho)) ==
        Catch::Approx(divergence(sigma, rho)).margin(1e-12));
  const QubitChannel dep = QubitChannel::from_affine(Mat3::scale(0.5), BlochVector{});
  const DensityMatrix s2 = bloch_to_density(BlochVector{0, 0, 0.4});
  const DensityMatrix r2 = bloch_to_density(BlochVector{0.15, 0, 0});
  CHECK(divergence(dep.apply(sigma), dep.apply(rho)) ==
        Catch::Approx(divergence(s2, r2)).margin(1e-12));
}

TEST_CASE("oracle agreement on reference and random channels", "[capacity]") {
  SECTION("identity channel") {
    const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
    std::vector<DensityMatrix> images;
    for (const BlochVector& b : fibonacci_sphere(1000))
      images.push_back(id.apply(bloch_to_density(b)));
    const CapacityEstimate seb = solve_divergence_seb(images);
    const CapacityEstimate ba = estimate_capacity_ba(images);
    CHECK(std::abs(seb.radius_nats - ba.radius_nats) < 5e-4);
  }
  Rng rng(52);
  for (int rep = 0; rep < 10; ++rep) {
    const QubitChannel ch = test::random_channel(rng);
    std::vector<DensityMatrix> images;
    for (const BlochVector& b : fibonacci_sphere(1000))
      images.push_back(ch.apply(bloch_to_density(b)));
    const CapacityEstimate seb = solve_divergence_seb(images, 400000, 1e-4);
    const CapacityEstimate ba = estimate_capacity_ba(images, 400000, 1e-4);
    INFO("random channel " << rep);
    CHECK(std::abs(seb.radius_nats - ba.radius_nats) < 5e-4);
  }
}

TEST_CASE("equidistance of the support set", "[capacity]") {
  const QubitChannel ch = amplitude_damping(0.3);
  const double tol = 1e-5;
  const CapacityEstimate est = estimate_capacity_seb(ch, 500, 200000, tol);
  std::vector<DensityMatrix> images;
  for (const BlochVector& b : fibonacci_sphere(500))
    images.push_back(ch.apply(bloch_to_density(b)));
  const ComplexMatrix lc = density_log(est.center);
  std::size_t support_count = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (est.support_weights[i] <= 1e-6) continue;
    ++support_count;
    const double d =
        divergence_from_parts(state_neg_entropy(images[i]), images[i].matrix(), lc);
    CHECK(std::abs(d - est.radius_nats) < 10 * tol);
  }
  CHECK(support_count >= 2);
  double wsum = 0.0;
  for (double w : est.support_weights) {
    CHECK(w >= 0.0);
    wsum += w;
  }
  CHECK(wsum == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("finer sampling cannot shrink the ball", "[capacity]") {
  const QubitChannel ch = amplitude_damping(0.3);
  const double coarse = estimate_capacity_seb(ch, 500, 200000, 5e-5).radius_nats;
  const double fine = estimate_capacity_seb(ch, 4000, 200000, 5e-5).radius_nats;
  CHECK(fine >= coarse - 1e-4);
}

TEST_CASE("estimate is covariant under output rotations", "[capacity]") {
  const double gamma = 0.4;
  const QubitChannel ch = amplitude_damping(gamma);
  const Mat3 o = rotation_z(0.7);
  const BlochVector t = ch.offset();
  const QubitChannel rotated = QubitChannel::from_affine(
      o * ch.linear_part(), o.apply(BlochVector{t.x, t.y, t.z}));
  const double a = estimate_capacity_seb(ch, 600, 200000, 5e-5).radius_nats;
  const double b = estimate_capacity_seb(rotated, 600, 200000, 5e-5).radius_nats;
  CHECK(std::abs(a - b) < 2e-4);
}

TEST_CASE("non-convergence carries the best iterate", "[capacity]") {
  const QubitChannel ch = amplitude_damping(0.3);
  try {
    estimate_capacity_seb(ch, 200, 3, 1e-12);
    FAIL("expected DidNotConvergeError");
  } catch (const DidNotConvergeError& e) {
    CHECK(e.best().radius_nats > 0.0);
    CHECK(e.best().residual > 1e-12);
  }
}

TEST_CASE("estimator input validation", "[capacity]") {
  const QubitChannel id = QubitChannel::from_affine(Mat3::identity(), BlochVector{});
  CHECK_THROWS_AS(estimate_capacity_seb(id, 1), RangeError);
  CHECK_THROWS_AS(estimate_capacity_ba({maximally_mixed(2)}), RangeError);
}
