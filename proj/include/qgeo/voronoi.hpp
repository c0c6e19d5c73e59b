#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qgeo/distances.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/random.hpp"
#include "qgeo/states.hpp"

namespace qgeo {

inline constexpr double kDefaultBand = 1e-7;

/// Shrink factors used to realize divergence labelings at pure sites (or
/// pure queries, for the dual divergence): the label is accepted only if it
/// is identical along the whole sequence.
inline const std::vector<double>& default_shrink_sequence() {
  static const std::vector<double> seq = {0.99, 0.999, 0.9999};
  return seq;
}

struct SiteSet {
  std::size_t dim = 0;
  std::vector<DensityMatrix> sites;
  std::vector<char> pure_flags;

  std::size_t size() const { return sites.size(); }

  bool all_pure() const {
    for (char f : pure_flags)
      if (!f) return false;
    return true;
  }

  static SiteSet create(std::vector<DensityMatrix> sites, double distinct_tol = 1e-9) {
    if (sites.size() < 2) throw RangeError("site set needs at least 2 sites");
    SiteSet s;
    s.dim = sites[0].dim();
    for (const DensityMatrix& m : sites) {
      if (m.dim() != s.dim) throw DimensionMismatchError("site set: mixed dimensions");
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        if (state_trace_distance(sites[i], sites[j]) <= distinct_tol) {
          throw InvalidStateError("site set: sites " + std::to_string(i) + " and " +
                                  std::to_string(j) + " coincide");
        }
      }
    }
    for (const DensityMatrix& m : sites) s.pure_flags.push_back(is_pure(m) ? 1 : 0);
    s.sites = std::move(sites);
    return s;
  }
};

enum class LabelVariant { Nearest, Farthest };

struct SiteMatch {
  std::size_t index = 0;
  double margin = 0.0;  // |best - second best|; 0 signals an ambiguous tie
};

struct Labeling {
  double band = kDefaultBand;
  std::vector<std::size_t> assignment;
  std::vector<double> margin;
  std::vector<char> boundary;  // margin < band, or unstable across the shrink sequence

  std::size_t size() const { return assignment.size(); }
};

struct AgreementReport {
  std::size_t compared = 0;  // samples where both labelings are off-boundary
  std::size_t mismatches = 0;
  std::vector<std::size_t> mismatch_indices;
  double band = 0.0;

  bool agree() const { return mismatches == 0; }
};

/// Deterministic Fibonacci lattice on the unit sphere.
inline std::vector<BlochVector> fibonacci_sphere(std::size_t n) {
  if (n < 1) throw RangeError("fibonacci_sphere: n must be >= 1");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<BlochVector> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    pts.push_back(BlochVector{r * std::cos(phi), r * std::sin(phi), z});
  }
  return pts;
}

/// n qubit states with Bloch vectors uniform in the ball of radius rmax < 1.
/// Seeded and reproducible (one z, phi, radius triple per point).
inline std::vector<DensityMatrix> sample_mixed_ball(std::size_t n, double rmax,
                                                    std::uint64_t seed) {
  if (!(rmax > 0.0 && rmax < 1.0)) throw RangeError("sample_mixed_ball: rmax must be in (0,1)");
  Rng rng(seed);
  std::vector<DensityMatrix> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BlochVector dir = rng.unit_vector();
    const double r = rmax * std::cbrt(rng.uniform01());
    out.push_back(bloch_to_density(BlochVector{r * dir.x, r * dir.y, r * dir.z}));
  }
  return out;
}

namespace detail {

/// Distance values of n samples against k sites. Limit kinds carry one value
/// matrix per shrink factor; `values` is the matrix at the last factor.
struct DistanceField {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> values;                 // n*k row-major
  std::vector<std::vector<double>> r_values;  // only for limit evaluation
  bool limit = false;

  double at(std::size_t sample, std::size_t site) const { return values[sample * k + site]; }
};

inline SiteMatch pick(const double* row, std::size_t k, LabelVariant variant) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < k; ++j) {
    const bool better = (variant == LabelVariant::Nearest) ? row[j] < row[best]
                                                           : row[j] > row[best];
    if (better) best = j;
  }
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    if (j == best) continue;
    second = std::min(second, std::abs(row[j] - row[best]));
  }
  return SiteMatch{best, second};
}

inline Labeling labeling_from_field(const DistanceField& f, LabelVariant variant, double band) {
  Labeling lab;
  lab.band = band;
  lab.assignment.resize(f.n);
  lab.margin.resize(f.n);
  lab.boundary.resize(f.n);
  for (std::size_t i = 0; i < f.n; ++i) {
    const SiteMatch m = pick(&f.values[i * f.k], f.k, variant);
    bool stable = true;
    if (f.limit) {
      for (const std::vector<double>& vr : f.r_values) {
        if (pick(&vr[i * f.k], f.k, variant).index != m.index) {
          stable = false;
          break;
        }
      }
    }
    lab.assignment[i] = m.index;
    lab.margin[i] = m.margin;
    lab.boundary[i] = (m.margin < band || !stable) ? 1 : 0;
  }
  return lab;
}

inline bool full_rank(const DensityMatrix& s) {
  return hermitian_eigen(s.matrix()).min_eigenvalue() > kFullRankEig;
}

/// V_D values D(sample || shrink(site, r)) for each r in the sequence.
inline DistanceField divergence_limit_field(const std::vector<DensityMatrix>& samples,
                                            const SiteSet& sites,
                                            const std::vector<double>& r_seq) {
  DistanceField f;
  f.n = samples.size();
  f.k = sites.size();
  f.limit = true;
  std::vector<double> neg_ent(f.n);
  for (std::size_t i = 0; i < f.n; ++i) neg_ent[i] = state_neg_entropy(samples[i]);
  for (double r : r_seq) {
    std::vector<ComplexMatrix> logs;
    logs.reserve(f.k);
    for (const DensityMatrix& s : sites.sites) logs.push_back(density_log(shrink_toward_center(s, r)));
    std::vector<double> vals(f.n * f.k);
    for (std::size_t i = 0; i < f.n; ++i)
      for (std::size_t j = 0; j < f.k; ++j)
        vals[i * f.k + j] = divergence_from_parts(neg_ent[i], samples[i].matrix(), logs[j]);
    f.r_values.push_back(std::move(vals));
  }
  f.values = f.r_values.back();
  return f;
}

/// V_D* values D(site || shrink(sample, r)).
inline DistanceField divergence_dual_limit_field(const std::vector<DensityMatrix>& samples,
                                                 const SiteSet& sites,
                                                 const std::vector<double>& r_seq) {
  DistanceField f;
  f.n = samples.size();
  f.k = sites.size();
  f.limit = true;
  std::vector<double> site_neg_ent(f.k);
  for (std::size_t j = 0; j < f.k; ++j) site_neg_ent[j] = state_neg_entropy(sites.sites[j]);
  for (double r : r_seq) {
    std::vector<double> vals(f.n * f.k);
    for (std::size_t i = 0; i < f.n; ++i) {
      const ComplexMatrix lq = density_log(shrink_toward_center(samples[i], r));
      for (std::size_t j = 0; j < f.k; ++j)
        vals[i * f.k + j] = divergence_from_parts(site_neg_ent[j], sites.sites[j].matrix(), lq);
    }
    f.r_values.push_back(std::move(vals));
  }
  f.values = f.r_values.back();
  return f;
}

inline DistanceField compute_field(const std::vector<DensityMatrix>& samples,
                                   const SiteSet& sites, DistanceKind kind,
                                   const std::vector<double>& r_seq) {
  DistanceField f;
  f.n = samples.size();
  f.k = sites.size();
  f.values.assign(f.n * f.k, 0.0);

  switch (kind) {
    case DistanceKind::FubiniStudy:
    case DistanceKind::BuresPure: {
      for (std::size_t j = 0; j < f.k; ++j) {
        if (!sites.pure_flags[j])
          throw NotPureError("site " + std::to_string(j) + " is not pure");
      }
      for (std::size_t i = 0; i < f.n; ++i) {
        if (!is_pure(samples[i]))
          throw NotPureError("sample " + std::to_string(i) + " is not pure");
        for (std::size_t j = 0; j < f.k; ++j) {
          const double t = clamp_unit(
              trace_product(samples[i].matrix(), sites.sites[j].matrix()), "overlap");
          f.values[i * f.k + j] =
              (kind == DistanceKind::FubiniStudy) ? std::acos(std::sqrt(t)) : std::sqrt(1.0 - t);
        }
      }
      return f;
    }
    case DistanceKind::Bures: {
      std::vector<ComplexMatrix> site_sqrt;
      site_sqrt.reserve(f.k);
      for (const DensityMatrix& s : sites.sites) site_sqrt.push_back(matrix_sqrt(s.matrix()));
      for (std::size_t i = 0; i < f.n; ++i) {
        const ComplexMatrix q_sqrt = matrix_sqrt(samples[i].matrix());
        for (std::size_t j = 0; j < f.k; ++j) {
          f.values[i * f.k + j] = bures_from_sqrts(q_sqrt, samples[i].matrix(), site_sqrt[j],
                                                   sites.sites[j].matrix());
        }
      }
      return f;
    }
    case DistanceKind::EuclideanXi: {
      std::vector<XiVector> site_xi;
      site_xi.reserve(f.k);
      for (const DensityMatrix& s : sites.sites) site_xi.push_back(state_to_xi(s));
      for (std::size_t i = 0; i < f.n; ++i) {
        const XiVector q = state_to_xi(samples[i]);
        for (std::size_t j = 0; j < f.k; ++j)
          f.values[i * f.k + j] = euclidean_sq(q, site_xi[j]);
      }
      return f;
    }
    case DistanceKind::GeodesicSphere: {
      if (sites.dim != 2) throw DimensionMismatchError("geodesic labeling needs d = 2");
      std::vector<BlochVector> site_b;
      site_b.reserve(f.k);
      for (const DensityMatrix& s : sites.sites) site_b.push_back(density_to_bloch(s));
      for (std::size_t i = 0; i < f.n; ++i) {
        const BlochVector q = density_to_bloch(samples[i]);
        if (std::abs(q.norm() - 1.0) > 1e-9)
          throw NotOnSphereError("sample " + std::to_string(i) + " is not on the sphere");
        for (std::size_t j = 0; j < f.k; ++j)
          f.values[i * f.k + j] = geodesic_sphere(q, site_b[j]);
      }
      return f;
    }
    case DistanceKind::Divergence: {
      // With a shrink sequence available, rank-deficient sites switch the
      // evaluation to the limit realization; without one (direct single-query
      // ops) the rank error propagates from density_log below.
      bool all_full_rank = true;
      for (const DensityMatrix& s : sites.sites) {
        if (!full_rank(s)) {
          all_full_rank = false;
          break;
        }
      }
      if (!all_full_rank && !r_seq.empty()) return divergence_limit_field(samples, sites, r_seq);
      std::vector<ComplexMatrix> logs;
      logs.reserve(f.k);
      for (const DensityMatrix& s : sites.sites) logs.push_back(density_log(s));
      for (std::size_t i = 0; i < f.n; ++i) {
        const double ne = state_neg_entropy(samples[i]);
        for (std::size_t j = 0; j < f.k; ++j)
          f.values[i * f.k + j] = divergence_from_parts(ne, samples[i].matrix(), logs[j]);
      }
      return f;
    }
    case DistanceKind::DivergenceDual: {
      bool all_full_rank = true;
      for (const DensityMatrix& s : samples) {
        if (!full_rank(s)) {
          all_full_rank = false;
          break;
        }
      }
      if (!all_full_rank && !r_seq.empty())
        return divergence_dual_limit_field(samples, sites, r_seq);
      std::vector<double> site_neg_ent(f.k);
      for (std::size_t j = 0; j < f.k; ++j) site_neg_ent[j] = state_neg_entropy(sites.sites[j]);
      for (std::size_t i = 0; i < f.n; ++i) {
        const ComplexMatrix lq = density_log(samples[i]);
        for (std::size_t j = 0; j < f.k; ++j)
          f.values[i * f.k + j] =
              divergence_from_parts(site_neg_ent[j], sites.sites[j].matrix(), lq);
      }
      return f;
    }
  }
  throw Error("unreachable distance kind");
}

}  // namespace detail

/// Direct distance evaluation of a single query against every site (the
/// domain of `kind` must admit the arguments as-is; rank-deficient cases are
/// reported via the usual errors). Margin 0 signals an ambiguous tie.
inline SiteMatch nearest_site(const DensityMatrix& query, const SiteSet& sites,
                              DistanceKind kind) {
  std::vector<DensityMatrix> one{query};
  const detail::DistanceField f = detail::compute_field(one, sites, kind, {});
  return detail::pick(f.values.data(), f.k, LabelVariant::Nearest);
}

inline SiteMatch farthest_site(const DensityMatrix& query, const SiteSet& sites,
                               DistanceKind kind) {
  std::vector<DensityMatrix> one{query};
  const detail::DistanceField f = detail::compute_field(one, sites, kind, {});
  return detail::pick(f.values.data(), f.k, LabelVariant::Farthest);
}

/// Label every sample with its nearest (or farthest) site under `kind`.
/// Divergence labelings whose site (or, for the dual, query) is not full
/// rank are realized through the shrink sequence; samples whose label is not
/// stable along the sequence are flagged as boundary.
inline Labeling label_samples(const std::vector<DensityMatrix>& samples, const SiteSet& sites,
                              DistanceKind kind, LabelVariant variant,
                              double eps_band = kDefaultBand,
                              const std::vector<double>& r_seq = default_shrink_sequence()) {
  const detail::DistanceField f = detail::compute_field(samples, sites, kind, r_seq);
  return detail::labeling_from_field(f, variant, eps_band);
}

struct LimitLabel {
  std::size_t index = 0;
  bool stable = false;
  double margin = 0.0;
};

/// V_D label of a query against pure sites, realized by shrinking the sites
/// toward I/d along r_seq and requiring a stable winner.
inline LimitLabel divergence_label_pure_limit(
    const DensityMatrix& query, const SiteSet& sites,
    const std::vector<double>& r_seq = default_shrink_sequence(),
    LabelVariant variant = LabelVariant::Nearest) {
  if (r_seq.empty()) throw RangeError("divergence_label_pure_limit: empty shrink sequence");
  std::vector<DensityMatrix> one{query};
  const detail::DistanceField f = detail::divergence_limit_field(one, sites, r_seq);
  const SiteMatch last = detail::pick(f.values.data(), f.k, variant);
  bool stable = true;
  for (const std::vector<double>& vr : f.r_values) {
    if (detail::pick(vr.data(), f.k, variant).index != last.index) stable = false;
  }
  return LimitLabel{last.index, stable, last.margin};
}

/// V_D* label of a pure query: the query is shrunk instead of the sites.
inline LimitLabel divergence_dual_label_pure_limit(
    const DensityMatrix& query, const SiteSet& sites,
    const std::vector<double>& r_seq = default_shrink_sequence(),
    LabelVariant variant = LabelVariant::Nearest) {
  if (r_seq.empty()) throw RangeError("divergence_dual_label_pure_limit: empty shrink sequence");
  std::vector<DensityMatrix> one{query};
  const detail::DistanceField f = detail::divergence_dual_limit_field(one, sites, r_seq);
  const SiteMatch last = detail::pick(f.values.data(), f.k, variant);
  bool stable = true;
  for (const std::vector<double>& vr : f.r_values) {
    if (detail::pick(vr.data(), f.k, variant).index != last.index) stable = false;
  }
  return LimitLabel{last.index, stable, last.margin};
}

/// Compare two labelings sample by sample, skipping any sample that is
/// boundary in either one.
inline AgreementReport labelings_agree(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) throw LengthMismatchError("labelings_agree: sample counts differ");
  AgreementReport rep;
  rep.band = std::max(a.band, b.band);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.boundary[i] || b.boundary[i]) continue;
    ++rep.compared;
    if (a.assignment[i] != b.assignment[i]) {
      ++rep.mismatches;
      rep.mismatch_indices.push_back(i);
    }
  }
  return rep;
}

}  // namespace qgeo
