#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "qgeo/distances.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/random.hpp"
#include "qgeo/states.hpp"
#include "qgeo/voronoi.hpp"

namespace qgeo {

/// The (d+1)-plane section of xi space keeps the diagonal coordinates
/// xi_1..xi_{d-1} and the single off-diagonal pair (xi_d, xi_{d+1}); every
/// other coordinate is zero, which zeroes the matrix outside the arrow
/// pattern: a 2x2 corner block plus the remaining diagonal.
inline XiVector section_embed(std::size_t d, std::span<const double> diag, double xid,
                              double xid1) {
  if (d < 3) throw RangeError("section_embed: dimension must be >= 3");
  if (diag.size() != d - 1) {
    throw LengthMismatchError("section_embed: expected " + std::to_string(d - 1) +
                              " diagonal coordinates");
  }
  XiVector xi;
  xi.dim = d;
  xi.values.assign(d * d - 1, 0.0);
  for (std::size_t i = 0; i + 1 < d; ++i) xi.values[i] = diag[i];
  xi.values[d - 1] = xid;  // xi_d, real part of entry (1,2)
  xi.values[d] = xid1;     // xi_{d+1}, imaginary part of entry (1,2)
  return xi;
}

/// A site of the section, identified by the three coordinates entering the
/// bisector formulas. When embedded as a state it is completed to the pure
/// shell: xi_2 = d-2-eta_1 and the remaining diagonal coordinates equal -1,
/// which leaves all weight in the leading 2x2 block.
struct SectionSite {
  std::size_t dim = 3;
  double eta1 = 0.0;
  double etad = 0.0;
  double etad1 = 0.0;
};

/// Query coordinates entering the residuals.
struct SectionCoords {
  double xi1 = 0.0;
  double xid = 0.0;
  double xid1 = 0.0;
};

inline XiVector pure_section_xi(const SectionSite& s) {
  const std::size_t d = s.dim;
  std::vector<double> diag(d - 1, -1.0);
  diag[0] = s.eta1;
  diag[1] = static_cast<double>(d) - 2.0 - s.eta1;
  return section_embed(d, diag, s.etad, s.etad1);
}

/// Embedded state of a section site; pure when the site lies on the
/// section's pure-state ellipsoid (checked within 1e-9).
inline DensityMatrix section_pure_state(const SectionSite& s) {
  const DensityMatrix rho = DensityMatrix::from_matrix(xi_to_matrix(pure_section_xi(s)));
  if (!is_pure(rho)) {
    throw NotPureError("section site (" + std::to_string(s.eta1) + ", " +
                       std::to_string(s.etad) + ", " + std::to_string(s.etad1) +
                       ") is not on the pure-state ellipsoid");
  }
  return rho;
}

/// The section's pure states satisfy (2(xi_1-(d-2)/2)/d)^2 + xi_d^2 +
/// xi_{d+1}^2 = 1: an ellipsoid with one semi-axis of length d/2. This map
/// rescales that axis, sending the ellipsoid to the unit sphere. It is also
/// the Bloch vector of the leading 2x2 block.
inline BlochVector section_sphere_point(std::size_t d, double xi1, double xid, double xid1) {
  const double dd = static_cast<double>(d);
  return BlochVector{2.0 * (xi1 - (dd - 2.0) / 2.0) / dd, xid, xid1};
}

inline BlochVector section_sphere_point(const SectionSite& s) {
  return section_sphere_point(s.dim, s.eta1, s.etad, s.etad1);
}

/// Site on the pure-state ellipsoid from a point of the unit sphere.
inline SectionSite section_site_from_sphere(std::size_t d, const BlochVector& u) {
  const double dd = static_cast<double>(d);
  return SectionSite{d, (dd - 2.0) / 2.0 + dd / 2.0 * u.x, u.y, u.z};
}

inline SectionSite random_pure_section_site(Rng& rng, std::size_t d) {
  return section_site_from_sphere(d, rng.unit_vector());
}

/// Divergence-bisector residual of the section: positive where the query is
/// nearer the first site. Exact (as a sign predicate) on the slice
/// xi_2 = d-2-xi_1, which contains the pure-state ellipsoid.
inline double boundary_residual_divergence(const SectionSite& a, const SectionSite& b,
                                           const SectionCoords& q) {
  if (a.dim != b.dim) throw DimensionMismatchError("residual: site dimensions differ");
  const double dd = static_cast<double>(a.dim);
  return (a.etad - b.etad) * q.xid + (a.etad1 - b.etad1) * q.xid1 +
         4.0 * (a.eta1 - b.eta1) * (q.xi1 - (dd - 2.0) / 2.0) / (dd * dd);
}

/// Euclidean-bisector residual d(sigma, rho_a) - d(sigma, rho_b) on the same
/// slice, expanded in the three free coordinates.
inline double boundary_residual_euclidean(const SectionSite& a, const SectionSite& b,
                                          const SectionCoords& q) {
  if (a.dim != b.dim) throw DimensionMismatchError("residual: site dimensions differ");
  return -4.0 * (a.eta1 - b.eta1) * q.xi1 - 2.0 * (a.etad - b.etad) * q.xid -
         2.0 * (a.etad1 - b.etad1) * q.xid1 + 2.0 * (a.eta1 * a.eta1 - b.eta1 * b.eta1) +
         (a.etad * a.etad - b.etad * b.etad) + (a.etad1 * a.etad1 - b.etad1 * b.etad1);
}

/// Coefficients of (xi_1, xi_d, xi_{d+1}) in the two residuals. The vectors
/// are not proportional for generic site pairs, so the bisectors differ.
inline std::array<double, 3> divergence_bisector_coefficients(const SectionSite& a,
                                                              const SectionSite& b) {
  const double dd = static_cast<double>(a.dim);
  return {4.0 * (a.eta1 - b.eta1) / (dd * dd), a.etad - b.etad, a.etad1 - b.etad1};
}

inline std::array<double, 3> euclidean_bisector_coefficients(const SectionSite& a,
                                                             const SectionSite& b) {
  return {-4.0 * (a.eta1 - b.eta1), -2.0 * (a.etad - b.etad), -2.0 * (a.etad1 - b.etad1)};
}

inline double cross_product_norm(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  return std::sqrt(cx * cx + cy * cy + cz * cz);
}

/// Geodesic labeling of section points after the ellipsoid-to-sphere rescale.
inline Labeling section_geodesic_labeling(const std::vector<SectionSite>& sites,
                                          const std::vector<SectionSite>& samples,
                                          LabelVariant variant = LabelVariant::Nearest,
                                          double band = kDefaultBand) {
  if (sites.size() < 2) throw RangeError("section_geodesic_labeling: need >= 2 sites");
  std::vector<BlochVector> site_pts;
  site_pts.reserve(sites.size());
  for (const SectionSite& s : sites) site_pts.push_back(section_sphere_point(s));
  detail::DistanceField f;
  f.n = samples.size();
  f.k = sites.size();
  f.values.resize(f.n * f.k);
  for (std::size_t i = 0; i < f.n; ++i) {
    const BlochVector q = section_sphere_point(samples[i]);
    for (std::size_t j = 0; j < f.k; ++j) f.values[i * f.k + j] = geodesic_sphere(q, site_pts[j]);
  }
  return detail::labeling_from_field(f, variant, band);
}

/// Divergence labeling (pure-site shrink realization) of embedded section
/// samples against embedded section sites.
inline Labeling section_divergence_labeling(
    const std::vector<SectionSite>& sites, const std::vector<SectionSite>& samples,
    LabelVariant variant = LabelVariant::Nearest, double band = kDefaultBand,
    const std::vector<double>& r_seq = default_shrink_sequence()) {
  std::vector<DensityMatrix> site_states;
  site_states.reserve(sites.size());
  for (const SectionSite& s : sites) site_states.push_back(section_pure_state(s));
  std::vector<DensityMatrix> sample_states;
  sample_states.reserve(samples.size());
  for (const SectionSite& s : samples) sample_states.push_back(section_pure_state(s));
  const SiteSet set = SiteSet::create(std::move(site_states));
  return label_samples(sample_states, set, DistanceKind::Divergence, variant, band, r_seq);
}

/// On the pure-state ellipsoid, the divergence diagram coincides with the
/// geodesic diagram of the rescaled sphere: compare the two labelings.
inline AgreementReport ellipsoid_sphere_check(
    const std::vector<SectionSite>& sites, const std::vector<SectionSite>& samples,
    double band = kDefaultBand, const std::vector<double>& r_seq = default_shrink_sequence()) {
  const Labeling div = section_divergence_labeling(sites, samples, LabelVariant::Nearest, band, r_seq);
  const Labeling geo = section_geodesic_labeling(sites, samples, LabelVariant::Nearest, band);
  return labelings_agree(div, geo);
}

}  // namespace qgeo
