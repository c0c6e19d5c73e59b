#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qgeo/distances.hpp"
#include "qgeo/random.hpp"
#include "qgeo/section.hpp"
#include "qgeo/states.hpp"
#include "qgeo/voronoi.hpp"

namespace qgeo {

/// Configuration of a coincidence experiment (one site set, one sample set,
/// several distance kinds labeled against each other).
struct CoincidenceConfig {
  std::size_t dim = 2;
  std::size_t k_sites = 4;
  std::size_t n_samples = 2000;
  std::uint64_t seed = 1;
  double band = kDefaultBand;
  double rmax = 0.95;  // mixed-suite ball radius
  LabelVariant variant = LabelVariant::Nearest;
  std::vector<DistanceKind> metrics;  // empty = suite default
};

struct PairReport {
  DistanceKind a;
  DistanceKind b;
  AgreementReport report;
};

struct CoincidenceResult {
  std::vector<DensityMatrix> sites;
  std::vector<DensityMatrix> samples;
  std::vector<std::pair<DistanceKind, Labeling>> labelings;
  std::vector<PairReport> pairs;
  bool all_agree = true;
};

inline std::vector<DistanceKind> default_pure_metrics(std::size_t d) {
  if (d == 2) {
    return {DistanceKind::FubiniStudy,  DistanceKind::BuresPure,
            DistanceKind::Bures,        DistanceKind::GeodesicSphere,
            DistanceKind::EuclideanXi,  DistanceKind::Divergence,
            DistanceKind::DivergenceDual};
  }
  return {DistanceKind::FubiniStudy, DistanceKind::BuresPure, DistanceKind::DivergenceDual};
}

inline std::vector<DistanceKind> default_mixed_metrics() {
  return {DistanceKind::Bures, DistanceKind::EuclideanXi, DistanceKind::Divergence,
          DistanceKind::DivergenceDual};
}

namespace detail {

inline std::vector<DensityMatrix> random_distinct_pure_sites(Rng& rng, std::size_t d,
                                                             std::size_t k) {
  std::vector<DensityMatrix> sites;
  std::size_t attempts = 0;
  while (sites.size() < k) {
    if (++attempts > 1000 * k) throw Error("could not draw distinct pure sites");
    DensityMatrix cand = rng.haar_pure(d);
    bool ok = true;
    for (const DensityMatrix& s : sites) {
      if (state_trace_distance(cand, s) <= 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) sites.push_back(std::move(cand));
  }
  return sites;
}

inline CoincidenceResult run_coincidence(const CoincidenceConfig& cfg,
                                         std::vector<DensityMatrix> samples,
                                         std::vector<DistanceKind> metrics) {
  Rng rng(cfg.seed);
  CoincidenceResult res;
  res.sites = random_distinct_pure_sites(rng, cfg.dim, cfg.k_sites);
  res.samples = std::move(samples);
  const SiteSet set = SiteSet::create(res.sites);
  for (DistanceKind kind : metrics) {
    res.labelings.emplace_back(kind,
                               label_samples(res.samples, set, kind, cfg.variant, cfg.band));
  }
  for (std::size_t a = 0; a < res.labelings.size(); ++a) {
    for (std::size_t b = a + 1; b < res.labelings.size(); ++b) {
      PairReport pr{res.labelings[a].first, res.labelings[b].first,
                    labelings_agree(res.labelings[a].second, res.labelings[b].second)};
      res.all_agree = res.all_agree && pr.report.agree();
      res.pairs.push_back(std::move(pr));
    }
  }
  return res;
}

}  // namespace detail

/// Pure sites, pure queries. For d = 2 the queries are a Fibonacci lattice
/// on the Bloch sphere; for d >= 3 they are Haar-random pure states.
inline CoincidenceResult run_pure_coincidence(const CoincidenceConfig& cfg) {
  std::vector<DensityMatrix> samples;
  samples.reserve(cfg.n_samples);
  if (cfg.dim == 2) {
    for (const BlochVector& b : fibonacci_sphere(cfg.n_samples))
      samples.push_back(bloch_to_density(b));
  } else {
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) samples.push_back(rng.haar_pure(cfg.dim));
  }
  return detail::run_coincidence(
      cfg, std::move(samples),
      cfg.metrics.empty() ? default_pure_metrics(cfg.dim) : cfg.metrics);
}

/// Pure qubit sites, mixed queries drawn uniformly from the Bloch ball of
/// radius rmax.
inline CoincidenceResult run_mixed_coincidence(const CoincidenceConfig& cfg) {
  if (cfg.dim != 2) throw DimensionMismatchError("mixed suite is defined for d = 2");
  return detail::run_coincidence(cfg, sample_mixed_ball(cfg.n_samples, cfg.rmax, cfg.seed + 1),
                                 cfg.metrics.empty() ? default_mixed_metrics() : cfg.metrics);
}

struct SectionMismatchExhibit {
  bool found = false;
  std::size_t sample_index = 0;
  double margin_div = 0.0;
  double margin_euclid = 0.0;
};

struct SectionPairCoefficients {
  std::size_t site_a = 0;
  std::size_t site_b = 0;
  std::array<double, 3> divergence_coeffs{};
  std::array<double, 3> euclidean_coeffs{};
  double cross_norm = 0.0;
};

struct SectionSuiteResult {
  std::vector<SectionSite> sites;
  std::vector<SectionSite> samples;
  Labeling divergence_labels;
  Labeling euclid_labels;
  Labeling geodesic_labels;
  AgreementReport div_vs_euclid;
  AgreementReport div_vs_geodesic;
  SectionMismatchExhibit exhibit;
  std::vector<SectionPairCoefficients> coefficients;
};

/// d >= 3 section analysis: pure sites and pure queries on the section's
/// pure-state ellipsoid. The divergence labeling must coincide with the
/// geodesic labeling of the rescaled sphere and must disagree with the
/// Euclidean labeling somewhere off the boundary band.
inline SectionSuiteResult run_section_suite(std::size_t d, std::size_t k_sites,
                                            std::size_t n_samples, std::uint64_t seed,
                                            double band = kDefaultBand,
                                            double exhibit_margin = 1e-3) {
  if (d < 3) throw RangeError("section suite requires d >= 3");
  if (k_sites < 2) throw RangeError("section suite requires k >= 2 sites");
  Rng rng(seed);
  SectionSuiteResult res;
  while (res.sites.size() < k_sites) {
    SectionSite cand = random_pure_section_site(rng, d);
    bool ok = true;
    for (const SectionSite& s : res.sites) {
      const BlochVector pa = section_sphere_point(cand);
      const BlochVector pb = section_sphere_point(s);
      if (geodesic_sphere(pa, pb) <= 1e-4) {
        ok = false;
        break;
      }
    }
    if (ok) res.sites.push_back(cand);
  }
  res.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    res.samples.push_back(random_pure_section_site(rng, d));

  res.divergence_labels = section_divergence_labeling(res.sites, res.samples,
                                                      LabelVariant::Nearest, band);
  res.geodesic_labels = section_geodesic_labeling(res.sites, res.samples,
                                                  LabelVariant::Nearest, band);
  {
    std::vector<DensityMatrix> site_states;
    for (const SectionSite& s : res.sites) site_states.push_back(section_pure_state(s));
    std::vector<DensityMatrix> sample_states;
    for (const SectionSite& s : res.samples) sample_states.push_back(section_pure_state(s));
    const SiteSet set = SiteSet::create(std::move(site_states));
    res.euclid_labels = label_samples(sample_states, set, DistanceKind::EuclideanXi,
                                      LabelVariant::Nearest, band);
  }
  res.div_vs_euclid = labelings_agree(res.divergence_labels, res.euclid_labels);
  res.div_vs_geodesic = labelings_agree(res.divergence_labels, res.geodesic_labels);

  double best = 0.0;
  for (std::size_t idx : res.div_vs_euclid.mismatch_indices) {
    const double m = std::min(res.divergence_labels.margin[idx], res.euclid_labels.margin[idx]);
    if (m > exhibit_margin && m > best) {
      best = m;
      res.exhibit = SectionMismatchExhibit{true, idx, res.divergence_labels.margin[idx],
                                           res.euclid_labels.margin[idx]};
    }
  }

  for (std::size_t a = 0; a < res.sites.size(); ++a) {
    for (std::size_t b = a + 1; b < res.sites.size(); ++b) {
      SectionPairCoefficients pc;
      pc.site_a = a;
      pc.site_b = b;
      pc.divergence_coeffs = divergence_bisector_coefficients(res.sites[a], res.sites[b]);
      pc.euclidean_coeffs = euclidean_bisector_coefficients(res.sites[a], res.sites[b]);
      pc.cross_norm = cross_product_norm(pc.divergence_coeffs, pc.euclidean_coeffs);
      res.coefficients.push_back(pc);
    }
  }
  return res;
}

struct SignCheckRow {
  double xi1 = 0.0;
  double xid = 0.0;
  double xid1 = 0.0;
  double residual = 0.0;
  double primal_diff = 0.0;  // D(sigma || shrink(site_b)) - D(sigma || shrink(site_a))
  double dual_diff = 0.0;    // D(site_b || sigma) - D(site_a || sigma), block-restricted
  bool counted = false;      // |residual| > threshold
  bool match = false;
};

struct SignCheckResult {
  std::vector<SignCheckRow> rows;
  std::size_t checked = 0;
  std::size_t mismatched = 0;
  bool all_match() const { return mismatched == 0; }
};

namespace detail {

/// The leading 2x2 block of a slice query (xi_2 = d-2-xi_1 zeroes the rest
/// of the diagonal) is itself a qubit state; the dual divergence difference
/// against block-supported pure sites is evaluated there.
inline DensityMatrix section_block_state(std::size_t d, double xi1, double xid, double xid1) {
  const double dd = static_cast<double>(d);
  ComplexMatrix b(2);
  b(0, 0) = (xi1 + 1.0) / dd;
  b(1, 1) = (dd - 2.0 - xi1 + 1.0) / dd;
  b(0, 1) = cplx(0.5 * xid, -0.5 * xid1);
  b(1, 0) = std::conj(b(0, 1));
  return DensityMatrix::from_matrix(b);
}

}  // namespace detail

/// Validate the sign of the divergence bisector residual against numerical
/// divergence differences on a grid of mixed slice queries, for
/// `n_site_pairs` random pure site pairs. Queries sweep xi_1 and the angle
/// of (xi_d, xi_{d+1}) at `radial_fill` of the pure shell, so they stay
/// strictly inside the state set with a full-rank leading block.
inline SignCheckResult run_section_sign_check(std::size_t d, std::size_t n_site_pairs,
                                              std::size_t grid, std::uint64_t seed,
                                              double shrink_r = 0.9999,
                                              double residual_threshold = 1e-6,
                                              double radial_fill = 0.55) {
  if (d < 3) throw RangeError("sign check requires d >= 3");
  Rng rng(seed);
  SignCheckResult res;
  const double dd = static_cast<double>(d);
  for (std::size_t pair = 0; pair < n_site_pairs; ++pair) {
    const SectionSite sa = random_pure_section_site(rng, d);
    const SectionSite sb = random_pure_section_site(rng, d);
    const DensityMatrix ra = shrink_toward_center(section_pure_state(sa), shrink_r);
    const DensityMatrix rb = shrink_toward_center(section_pure_state(sb), shrink_r);
    const ComplexMatrix la = density_log(ra);
    const ComplexMatrix lb = density_log(rb);
    const DensityMatrix block_a = detail::section_block_state(d, sa.eta1, sa.etad, sa.etad1);
    const DensityMatrix block_b = detail::section_block_state(d, sb.eta1, sb.etad, sb.etad1);

    for (std::size_t gi = 0; gi < grid; ++gi) {
      // u in (-0.8, 0.8) of the sphere axis; xi1 = (d-2)/2 + (d/2) u.
      const double u = -0.8 + 1.6 * (static_cast<double>(gi) + 0.5) / static_cast<double>(grid);
      const double xi1 = (dd - 2.0) / 2.0 + dd / 2.0 * u;
      const double shell = std::sqrt(std::max(0.0, 1.0 - u * u));
      for (std::size_t gj = 0; gj < grid; ++gj) {
        const double theta =
            2.0 * std::numbers::pi * static_cast<double>(gj) / static_cast<double>(grid);
        const double xid = radial_fill * shell * std::cos(theta);
        const double xid1 = radial_fill * shell * std::sin(theta);

        std::vector<double> diag(d - 1, -1.0);
        diag[0] = xi1;
        diag[1] = dd - 2.0 - xi1;
        const DensityMatrix sigma =
            DensityMatrix::from_matrix(xi_to_matrix(section_embed(d, diag, xid, xid1)));
        const double ne = state_neg_entropy(sigma);

        SignCheckRow row;
        row.xi1 = xi1;
        row.xid = xid;
        row.xid1 = xid1;
        row.residual = boundary_residual_divergence(sa, sb, SectionCoords{xi1, xid, xid1});
        row.primal_diff = divergence_from_parts(ne, sigma.matrix(), lb) -
                          divergence_from_parts(ne, sigma.matrix(), la);
        // block-restricted dual difference for the same query
        const DensityMatrix block_q = detail::section_block_state(d, xi1, xid, xid1);
        row.dual_diff = divergence(block_b, block_q) - divergence(block_a, block_q);
        row.counted = std::abs(row.residual) > residual_threshold;
        if (row.counted) {
          ++res.checked;
          const bool primal_ok = (row.residual > 0.0) == (row.primal_diff > 0.0);
          const bool dual_ok = (row.residual > 0.0) == (row.dual_diff > 0.0);
          row.match = primal_ok && dual_ok;
          if (!row.match) ++res.mismatched;
        }
        res.rows.push_back(row);
      }
    }
  }
  return res;
}

}  // namespace qgeo
