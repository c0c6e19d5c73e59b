#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qgeo/distances.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/states.hpp"
#include "qgeo/voronoi.hpp"

namespace qgeo {

/// 3x3 real matrix acting on Bloch vectors.
struct Mat3 {
  std::array<double, 9> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    return r;
  }

  static Mat3 scale(double s) {
    Mat3 r;
    r.m = {s, 0, 0, 0, s, 0, 0, 0, s};
    return r;
  }

  static Mat3 diagonal(double a, double b, double c) {
    Mat3 r;
    r.m = {a, 0, 0, 0, b, 0, 0, 0, c};
    return r;
  }

  double& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  double operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }

  BlochVector apply(const BlochVector& v) const {
    return BlochVector{m[0] * v.x + m[1] * v.y + m[2] * v.z,
                       m[3] * v.x + m[4] * v.y + m[5] * v.z,
                       m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
        c(i, j) = s;
      }
    return c;
  }
};

namespace detail {

inline ComplexMatrix pauli(std::size_t k) {
  switch (k) {
    case 0: return ComplexMatrix(2, {1, 0, 0, 1});
    case 1: return ComplexMatrix(2, {0, 1, 1, 0});
    case 2: return ComplexMatrix(2, {0, cplx(0, -1), cplx(0, 1), 0});
    default: return ComplexMatrix(2, {1, 0, 0, -1});
  }
}

/// Image of the basis element under the trace-preserving affine extension:
/// Gamma(I) = I + t.sigma, Gamma(sigma_k) = sum_j M_jk sigma_j.
inline ComplexMatrix channel_on_basis(const Mat3& m, const BlochVector& t, std::size_t k) {
  if (k == 0) {
    ComplexMatrix out = pauli(0);
    out += pauli(1) * cplx(t.x, 0);
    out += pauli(2) * cplx(t.y, 0);
    out += pauli(3) * cplx(t.z, 0);
    return out;
  }
  ComplexMatrix out(2);
  for (std::size_t j = 0; j < 3; ++j) {
    const double coef = m(j, k - 1);
    if (coef != 0.0) out += pauli(j + 1) * cplx(coef, 0);
  }
  return out;
}

}  // namespace detail

/// Qubit channel in affine Bloch form: b -> M b + t. Trace preservation is
/// automatic; complete positivity is validated through the Choi matrix at
/// construction.
class QubitChannel {
 public:
  static QubitChannel from_affine(const Mat3& m, const BlochVector& t) {
    QubitChannel ch(m, t);
    const EigenDecomposition e = hermitian_eigen(ch.choi());
    if (e.min_eigenvalue() < -1e-9) {
      throw NotCompletelyPositiveError(
          "channel is not completely positive: min Choi eigenvalue " +
              std::to_string(e.min_eigenvalue()),
          e.min_eigenvalue());
    }
    return ch;
  }

  /// Kraus operators K_i (2x2). Requires sum K_i^dagger K_i = I, then
  /// converts to affine form and validates like `from_affine`.
  static QubitChannel from_kraus(const std::vector<ComplexMatrix>& kraus) {
    if (kraus.empty()) throw RangeError("from_kraus: need at least one operator");
    ComplexMatrix tp(2);
    for (const ComplexMatrix& k : kraus) {
      if (k.dim() != 2) throw DimensionMismatchError("from_kraus: operators must be 2x2");
      tp += k.adjoint() * k;
    }
    if (max_abs_diff(tp, ComplexMatrix::identity(2)) > 1e-9) {
      throw NotTracePreservingError("from_kraus: sum K^dagger K differs from identity");
    }
    const auto gamma = [&kraus](const ComplexMatrix& a) {
      ComplexMatrix out(2);
      for (const ComplexMatrix& k : kraus) out += k * a * k.adjoint();
      return out;
    };
    Mat3 m;
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        m(j, k) = 0.5 * trace_product(detail::pauli(j + 1), gamma(detail::pauli(k + 1)));
      }
    }
    const ComplexMatrix gi = gamma(ComplexMatrix::identity(2));
    const BlochVector t{0.5 * trace_product(detail::pauli(1), gi),
                        0.5 * trace_product(detail::pauli(2), gi),
                        0.5 * trace_product(detail::pauli(3), gi)};
    return from_affine(m, t);
  }

  const Mat3& linear_part() const { return m_; }
  const BlochVector& offset() const { return t_; }

  /// (I (x) Gamma) applied to the unnormalized maximally entangled matrix:
  /// the block matrix [Gamma(E_ij)]. Positive semidefinite iff the channel
  /// is completely positive.
  ComplexMatrix choi() const {
    // E_00 = (I+sz)/2, E_01 = (sx+isy)/2, E_10 = (sx-isy)/2, E_11 = (I-sz)/2.
    const ComplexMatrix gi = detail::channel_on_basis(m_, t_, 0);
    const ComplexMatrix gx = detail::channel_on_basis(m_, t_, 1);
    const ComplexMatrix gy = detail::channel_on_basis(m_, t_, 2);
    const ComplexMatrix gz = detail::channel_on_basis(m_, t_, 3);
    const cplx half(0.5, 0.0);
    const cplx ihalf(0.0, 0.5);
    const ComplexMatrix b00 = (gi + gz) * half;
    const ComplexMatrix b01 = gx * half + gy * ihalf;
    const ComplexMatrix b10 = gx * half - gy * ihalf;
    const ComplexMatrix b11 = (gi - gz) * half;
    ComplexMatrix c(4);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        c(i, j) = b00(i, j);
        c(i, 2 + j) = b01(i, j);
        c(2 + i, j) = b10(i, j);
        c(2 + i, 2 + j) = b11(i, j);
      }
    }
    return c;
  }

  DensityMatrix apply(const DensityMatrix& rho) const {
    if (rho.dim() != 2) throw DimensionMismatchError("channel applies to qubit states only");
    const BlochVector b = density_to_bloch(rho);
    const BlochVector mb = m_.apply(b);
    return bloch_to_density(BlochVector{mb.x + t_.x, mb.y + t_.y, mb.z + t_.z});
  }

 private:
  QubitChannel(const Mat3& m, const BlochVector& t) : m_(m), t_(t) {}
  Mat3 m_;
  BlochVector t_;
};

/// Result of the smallest-enclosing-divergence-ball solvers. `radius_nats`
/// is max_i D(p_i || center) at the returned center; `residual` bounds the
/// remaining optimality gap. Support weights are nonzero only on points
/// within 10*tol of the radius and sum to one.
struct CapacityEstimate {
  double radius_nats = 0.0;
  DensityMatrix center;
  std::vector<double> support_weights;
  std::size_t iterations = 0;
  double residual = 0.0;
};

class DidNotConvergeError : public Error {
 public:
  DidNotConvergeError(const std::string& what, CapacityEstimate best)
      : Error(what), best_(std::move(best)) {}
  const CapacityEstimate& best() const { return best_; }

 private:
  CapacityEstimate best_;
};

/// max_i D(p_i || center), ties broken by lowest index.
inline std::pair<double, std::size_t> divergence_radius(const std::vector<DensityMatrix>& points,
                                                        const DensityMatrix& center) {
  if (points.empty()) throw RangeError("divergence_radius: no points");
  const ComplexMatrix lc = density_log(center);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = divergence_from_parts(state_neg_entropy(points[i]), points[i].matrix(), lc);
    if (d > best) {
      best = d;
      arg = i;
    }
  }
  return {best, arg};
}

namespace detail {

inline constexpr double kRankSafetyEig = 1e-12;

/// Mix with 1e-12 * I/2 when an iterate loses full rank; below reporting
/// precision, keeps the divergence defined.
inline ComplexMatrix ensure_center_full_rank(ComplexMatrix sigma, EigenDecomposition& eig) {
  eig = hermitian_eigen(sigma);
  if (eig.min_eigenvalue() >= kRankSafetyEig) return sigma;
  const std::size_t d = sigma.dim();
  sigma *= cplx(1.0 / (1.0 + kRankSafetyEig), 0.0);
  const double add = kRankSafetyEig / (1.0 + kRankSafetyEig) / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i) sigma(i, i) += add;
  eig = hermitian_eigen(sigma);
  return sigma;
}

inline ComplexMatrix log_from_positive_eigen(const EigenDecomposition& e) {
  std::array<double, kMaxDim> mapped{};
  for (std::size_t i = 0; i < e.dim; ++i) mapped[i] = std::log(e.eigenvalues[i]);
  return reconstruct_from_eigen(e, std::span<const double>(mapped.data(), e.dim));
}

inline std::vector<double> support_from_weights(const std::vector<double>& w,
                                                const std::vector<double>& dists, double radius,
                                                double tol) {
  std::vector<double> out(w.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(dists[i] - radius) <= 10.0 * tol) {
      out[i] = w[i];
      total += w[i];
    }
  }
  if (total > 0.0) {
    for (double& v : out) v /= total;
  }
  return out;
}

}  // namespace detail

/// Smallest enclosing divergence ball by damped farthest-point mixing:
/// sigma_{k+1} = (1-a_k) sigma_k + a_k p*, a_k = 1/(k+2), starting from the
/// uniform average. This is the Bregman-ball analog of the classic core-set
/// update (the quantum divergence is the Bregman divergence of the negative
/// von Neumann entropy); the mixing weights double as an ensemble whose
/// Holevo quantity lower-bounds the radius, giving the stopping gap.
inline CapacityEstimate solve_divergence_seb(const std::vector<DensityMatrix>& points,
                                             std::size_t max_iter = 100000, double tol = 1e-5) {
  const std::size_t n = points.size();
  if (n < 2) throw RangeError("solve_divergence_seb: need at least 2 points");
  const std::size_t d = points[0].dim();

  std::vector<double> neg_ent(n);
  for (std::size_t i = 0; i < n; ++i) neg_ent[i] = state_neg_entropy(points[i]);

  ComplexMatrix sigma(d);
  for (const DensityMatrix& p : points) sigma += p.matrix();
  sigma *= cplx(1.0 / static_cast<double>(n), 0.0);
  std::vector<double> w(n, 1.0 / static_cast<double>(n));

  std::vector<double> dist(n);
  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  CapacityEstimate best{0.0, maximally_mixed(d), {}, 0, 0.0};

  for (std::size_t iter = 0; iter <= max_iter; ++iter) {
    EigenDecomposition eig;
    sigma = detail::ensure_center_full_rank(sigma, eig);
    const ComplexMatrix lc = detail::log_from_positive_eigen(eig);

    double upper = -std::numeric_limits<double>::infinity();
    std::size_t farthest = 0;
    double lower = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = neg_ent[i] - trace_product(points[i].matrix(), lc);
      if (dist[i] > upper) {
        upper = dist[i];
        farthest = i;
      }
      lower += w[i] * dist[i];
    }
    best_lower = std::max(best_lower, lower);
    const double gap = upper - best_lower;

    if (upper < best_upper) {
      best_upper = upper;
      best.radius_nats = upper;
      best.center = DensityMatrix::from_matrix_unchecked(sigma);
      best.support_weights = detail::support_from_weights(w, dist, upper, tol);
      best.iterations = iter;
      best.residual = gap;
    }

    if (gap < tol) {
      return CapacityEstimate{upper, DensityMatrix::from_matrix_unchecked(sigma),
                              detail::support_from_weights(w, dist, upper, tol), iter, gap};
    }

    const double alpha = 1.0 / (static_cast<double>(iter) + 2.0);
    sigma *= cplx(1.0 - alpha, 0.0);
    sigma += points[farthest].matrix() * cplx(alpha, 0.0);
    for (double& wi : w) wi *= (1.0 - alpha);
    w[farthest] += alpha;
  }
  throw DidNotConvergeError("smallest enclosing ball did not reach gap < " + std::to_string(tol) +
                                " in " + std::to_string(max_iter) + " iterations",
                            best);
}

/// Holevo capacity of a qubit channel: equally distributed points on the
/// Bloch sphere are mapped through the channel and the radius of their
/// smallest enclosing divergence ball is returned (in nats).
inline CapacityEstimate estimate_capacity_seb(const QubitChannel& ch, std::size_t n_points,
                                              std::size_t max_iter = 100000, double tol = 1e-5) {
  if (n_points < 2) throw RangeError("estimate_capacity_seb: need at least 2 points");
  std::vector<DensityMatrix> images;
  images.reserve(n_points);
  for (const BlochVector& b : fibonacci_sphere(n_points)) {
    images.push_back(ch.apply(bloch_to_density(b)));
  }
  return solve_divergence_seb(images, max_iter, tol);
}

/// Independent oracle for the same minimax value: maximize the Holevo
/// quantity S(sum w_i p_i) - sum w_i S(p_i) by multiplicative
/// (Blahut-Arimoto style) weight updates w_i <- w_i exp(D(p_i || sigma_w)).
inline CapacityEstimate estimate_capacity_ba(const std::vector<DensityMatrix>& points,
                                             std::size_t max_iter = 100000, double tol = 1e-5) {
  const std::size_t n = points.size();
  if (n < 2) throw RangeError("estimate_capacity_ba: need at least 2 points");
  const std::size_t d = points[0].dim();

  std::vector<double> neg_ent(n);
  for (std::size_t i = 0; i < n; ++i) neg_ent[i] = state_neg_entropy(points[i]);

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> dist(n);
  double best_upper = std::numeric_limits<double>::infinity();
  CapacityEstimate best{0.0, maximally_mixed(d), {}, 0, 0.0};

  for (std::size_t iter = 0; iter <= max_iter; ++iter) {
    ComplexMatrix sigma(d);
    for (std::size_t i = 0; i < n; ++i) sigma += points[i].matrix() * cplx(w[i], 0.0);
    EigenDecomposition eig;
    sigma = detail::ensure_center_full_rank(sigma, eig);
    const ComplexMatrix lc = detail::log_from_positive_eigen(eig);

    double upper = -std::numeric_limits<double>::infinity();
    double lower = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = neg_ent[i] - trace_product(points[i].matrix(), lc);
      upper = std::max(upper, dist[i]);
      lower += w[i] * dist[i];
    }
    const double gap = upper - lower;

    if (upper < best_upper) {
      best_upper = upper;
      best.radius_nats = upper;
      best.center = DensityMatrix::from_matrix_unchecked(sigma);
      best.support_weights = detail::support_from_weights(w, dist, upper, tol);
      best.iterations = iter;
      best.residual = gap;
    }

    if (gap < tol) {
      return CapacityEstimate{upper, DensityMatrix::from_matrix_unchecked(sigma),
                              detail::support_from_weights(w, dist, upper, tol), iter, gap};
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(dist[i] - upper);
      total += w[i];
    }
    for (double& wi : w) wi /= total;
  }
  throw DidNotConvergeError("Blahut-Arimoto did not reach gap < " + std::to_string(tol) + " in " +
                                std::to_string(max_iter) + " iterations",
                            best);
}

}  // namespace qgeo
