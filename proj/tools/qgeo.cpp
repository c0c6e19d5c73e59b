// Command-line surface: coincidence experiments, section analysis, Holevo
// capacity estimation, and SVG export of sphere labelings.
//
// Exit codes: 0 success, 1 scientific assertion failure (expected agreement
// or convergence not reached), 2 usage or input error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qgeo/experiments.hpp"
#include "qgeo/io.hpp"
#include "qgeo/version.hpp"

namespace fs = std::filesystem;
using namespace qgeo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScience = 1;
constexpr int kExitConfig = 2;

std::vector<DistanceKind> parse_metric_list(const std::string& csv) {
  std::vector<DistanceKind> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_distance_kind(tok));
  }
  return out;
}

OutputMeta make_meta(std::uint64_t seed, const json& config) {
  return OutputMeta{seed, fnv1a_hex(config.dump()), kVersion};
}

struct CoincideArgs {
  std::string suite = "pure";
  std::size_t d = 2;
  bool d_given = false;
  std::size_t random_k = 4;
  std::string sites_file;
  std::uint64_t seed = 1;
  std::size_t samples = 2000;
  double eps = kDefaultBand;
  std::string metrics;
  double rmax = 0.95;
  std::string variant = "nearest";
  bool expect_mismatch = false;
  std::string out_dir = "out";
};

int run_coincide(const CoincideArgs& a) {
  json config{{"cmd", "coincide"},   {"suite", a.suite},   {"d", a.d},
              {"random", a.random_k}, {"sites", a.sites_file}, {"seed", a.seed},
              {"samples", a.samples}, {"eps", a.eps},       {"metrics", a.metrics},
              {"rmax", a.rmax},       {"variant", a.variant},
              {"expect_mismatch", a.expect_mismatch}};
  const OutputMeta meta = make_meta(a.seed, config);
  fs::create_directories(a.out_dir);

  if (a.suite == "section") {
    const std::size_t d = a.d_given ? a.d : 3;
    if (d < 3) {
      std::cerr << "section suite requires --d >= 3\n";
      return kExitConfig;
    }
    const SectionSuiteResult res = run_section_suite(d, a.random_k, a.samples, a.seed, a.eps);
    std::vector<std::vector<double>> coords;
    for (const SectionSite& s : res.samples) coords.push_back({s.eta1, s.etad, s.etad1});
    std::vector<std::pair<DistanceKind, Labeling>> labelings{
        {DistanceKind::Divergence, res.divergence_labels},
        {DistanceKind::EuclideanXi, res.euclid_labels},
        {DistanceKind::GeodesicSphere, res.geodesic_labels}};
    write_text_file(a.out_dir + "/labels.csv",
                    labels_csv(meta, {"xi1", "xid", "xid1"}, coords, labelings));
    json pairs = json::array();
    pairs.push_back(json{{"a", "div"},
                         {"b", "euclid"},
                         {"report", agreement_to_json(res.div_vs_euclid)}});
    pairs.push_back(json{{"a", "div"},
                         {"b", "geodesic_rescaled"},
                         {"report", agreement_to_json(res.div_vs_geodesic)}});
    json coeffs = json::array();
    for (const SectionPairCoefficients& c : res.coefficients) {
      coeffs.push_back(json{{"site_a", c.site_a},
                            {"site_b", c.site_b},
                            {"divergence_coeffs", c.divergence_coeffs},
                            {"euclidean_coeffs", c.euclidean_coeffs},
                            {"cross_norm", c.cross_norm}});
    }
    json doc{{"meta", meta_json(meta)},
             {"pairs", pairs},
             {"coefficients", coeffs},
             {"exhibit", json{{"found", res.exhibit.found},
                              {"sample_index", res.exhibit.sample_index},
                              {"margin_div", res.exhibit.margin_div},
                              {"margin_euclid", res.exhibit.margin_euclid}}}};
    write_text_file(a.out_dir + "/agreement.json", doc.dump(2) + "\n");

    const bool geodesic_ok = res.div_vs_geodesic.agree();
    if (a.expect_mismatch) {
      const bool ok = geodesic_ok && res.exhibit.found;
      std::cout << (ok ? "section suite: divergence/Euclidean mismatch exhibited\n"
                       : "section suite: expected mismatch NOT found\n");
      return ok ? kExitOk : kExitScience;
    }
    return (geodesic_ok && res.div_vs_euclid.agree()) ? kExitOk : kExitScience;
  }

  CoincidenceConfig cfg;
  cfg.dim = a.d;
  cfg.k_sites = a.random_k;
  cfg.n_samples = a.samples;
  cfg.seed = a.seed;
  cfg.band = a.eps;
  cfg.rmax = a.rmax;
  cfg.variant = (a.variant == "farthest") ? LabelVariant::Farthest : LabelVariant::Nearest;
  if (!a.metrics.empty()) cfg.metrics = parse_metric_list(a.metrics);

  CoincidenceResult res =
      (a.suite == "mixed") ? run_mixed_coincidence(cfg) : run_pure_coincidence(cfg);
  if (!a.sites_file.empty()) {
    // Site files replace the random sites; rerun the labelings on them.
    std::vector<DensityMatrix> sites = load_sites_file(a.sites_file);
    const SiteSet set = SiteSet::create(sites);
    res.sites = std::move(sites);
    res.labelings.clear();
    res.pairs.clear();
    res.all_agree = true;
    const std::vector<DistanceKind> metrics =
        !cfg.metrics.empty() ? cfg.metrics
        : (a.suite == "mixed" ? default_mixed_metrics() : default_pure_metrics(cfg.dim));
    for (DistanceKind kind : metrics) {
      res.labelings.emplace_back(kind,
                                 label_samples(res.samples, set, kind, cfg.variant, cfg.band));
    }
    for (std::size_t x = 0; x < res.labelings.size(); ++x) {
      for (std::size_t y = x + 1; y < res.labelings.size(); ++y) {
        PairReport pr{res.labelings[x].first, res.labelings[y].first,
                      labelings_agree(res.labelings[x].second, res.labelings[y].second)};
        res.all_agree = res.all_agree && pr.report.agree();
        res.pairs.push_back(std::move(pr));
      }
    }
  }

  std::vector<std::string> coord_names;
  std::vector<std::vector<double>> coords;
  if (cfg.dim == 2) {
    coord_names = {"x", "y", "z"};
    for (const DensityMatrix& s : res.samples) {
      const BlochVector b = density_to_bloch(s);
      coords.push_back({b.x, b.y, b.z});
    }
  } else {
    for (std::size_t i = 0; i < cfg.dim * cfg.dim - 1; ++i)
      coord_names.push_back("xi" + std::to_string(i + 1));
    for (const DensityMatrix& s : res.samples) coords.push_back(state_to_xi(s).values);
  }
  write_text_file(a.out_dir + "/labels.csv",
                  labels_csv(meta, coord_names, coords, res.labelings));

  json pairs = json::array();
  bool any_mismatch = false;
  for (const PairReport& pr : res.pairs) {
    any_mismatch = any_mismatch || !pr.report.agree();
    pairs.push_back(json{{"a", to_string(pr.a)},
                         {"b", to_string(pr.b)},
                         {"report", agreement_to_json(pr.report)}});
  }
  json doc{{"meta", meta_json(meta)}, {"pairs", pairs}, {"all_agree", res.all_agree}};
  write_text_file(a.out_dir + "/agreement.json", doc.dump(2) + "\n");

  for (const PairReport& pr : res.pairs) {
    std::cout << to_string(pr.a) << " vs " << to_string(pr.b) << ": " << pr.report.mismatches
              << " mismatches / " << pr.report.compared << " compared\n";
  }
  if (a.expect_mismatch) return any_mismatch ? kExitOk : kExitScience;
  return res.all_agree ? kExitOk : kExitScience;
}

struct CapacityArgs {
  std::string channel_file;
  std::size_t points = 1000;
  double tol = 1e-5;
  std::size_t max_iter = 100000;
  std::uint64_t seed = 0;
  bool bits = false;
  std::string out_file = "estimate.json";
};

int run_capacity(const CapacityArgs& a) {
  json config{{"cmd", "capacity"}, {"channel", a.channel_file}, {"points", a.points},
              {"tol", a.tol},      {"max_iter", a.max_iter},    {"seed", a.seed}};
  const OutputMeta meta = make_meta(a.seed, config);
  const QubitChannel ch = load_channel_file(a.channel_file);

  std::vector<DensityMatrix> images;
  images.reserve(a.points);
  for (const BlochVector& b : fibonacci_sphere(a.points))
    images.push_back(ch.apply(bloch_to_density(b)));

  try {
    const CapacityEstimate est = solve_divergence_seb(images, a.max_iter, a.tol);
    write_text_file(a.out_file, estimate_to_json(est, images, meta).dump(2) + "\n");
    const double bits_v = est.radius_nats / std::numbers::ln2;
    if (a.bits) {
      std::printf("capacity: %.6f bits (%.6f nats)\n", bits_v, est.radius_nats);
    } else {
      std::printf("capacity: %.6f nats (%.6f bits)\n", est.radius_nats, bits_v);
    }
    return kExitOk;
  } catch (const DidNotConvergeError& e) {
    write_text_file(a.out_file, estimate_to_json(e.best(), images, meta).dump(2) + "\n");
    std::cerr << "did not converge: " << e.what() << "\n";
    return kExitScience;
  }
}

struct SectionArgs {
  std::size_t d = 3;
  std::uint64_t seed = 1;
  std::size_t pairs = 10;
  std::size_t grid = 20;
  double r = 0.9999;
  std::string out_dir = "out";
};

int run_section(const SectionArgs& a) {
  json config{{"cmd", "section"}, {"d", a.d},       {"seed", a.seed},
              {"pairs", a.pairs}, {"grid", a.grid}, {"r", a.r}};
  const OutputMeta meta = make_meta(a.seed, config);
  fs::create_directories(a.out_dir);

  // residual coefficient table for random pure site pairs
  Rng rng(a.seed);
  std::ostringstream table;
  table << "# qgeo version=" << meta.version << " seed=" << meta.seed
        << " config=" << meta.config_hash << "\n";
  table << "pair,eta1_a,etad_a,etad1_a,eta1_b,etad_b,etad1_b,"
           "div_c1,div_cd,div_cd1,euc_c1,euc_cd,euc_cd1,cross_norm\n";
  double min_cross = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < a.pairs; ++p) {
    const SectionSite sa = random_pure_section_site(rng, a.d);
    const SectionSite sb = random_pure_section_site(rng, a.d);
    const auto cd = divergence_bisector_coefficients(sa, sb);
    const auto ce = euclidean_bisector_coefficients(sa, sb);
    const double cross = cross_product_norm(cd, ce);
    min_cross = std::min(min_cross, cross);
    table << p << "," << format_double(sa.eta1) << "," << format_double(sa.etad) << ","
          << format_double(sa.etad1) << "," << format_double(sb.eta1) << ","
          << format_double(sb.etad) << "," << format_double(sb.etad1);
    for (double v : cd) table << "," << format_double(v);
    for (double v : ce) table << "," << format_double(v);
    table << "," << format_double(cross) << "\n";
  }
  write_text_file(a.out_dir + "/residuals.csv", table.str());

  const SignCheckResult sign = run_section_sign_check(a.d, a.pairs, a.grid, a.seed + 1, a.r);
  std::ostringstream rows;
  rows << "# qgeo version=" << meta.version << " seed=" << meta.seed
       << " config=" << meta.config_hash << "\n";
  rows << "xi1,xid,xid1,residual,primal_diff,dual_diff,counted,match\n";
  for (const SignCheckRow& r : sign.rows) {
    rows << format_double(r.xi1) << "," << format_double(r.xid) << "," << format_double(r.xid1)
         << "," << format_double(r.residual) << "," << format_double(r.primal_diff) << ","
         << format_double(r.dual_diff) << "," << (r.counted ? 1 : 0) << ","
         << (r.match ? 1 : 0) << "\n";
  }
  write_text_file(a.out_dir + "/signcheck.csv", rows.str());

  json doc{{"meta", meta_json(meta)},
           {"checked", sign.checked},
           {"mismatched", sign.mismatched},
           {"all_match", sign.all_match()},
           {"min_cross_norm", min_cross}};
  write_text_file(a.out_dir + "/summary.json", doc.dump(2) + "\n");

  std::cout << "sign check: " << sign.checked << " grid points checked, " << sign.mismatched
            << " sign mismatches; min coefficient cross norm " << min_cross << "\n";
  return (sign.all_match() && min_cross > 1e-6) ? kExitOk : kExitScience;
}

struct ExportArgs {
  std::string in_file;
  std::string metric;
  std::string out_file = "labels.svg";
};

int run_export(const ExportArgs& a) {
  json config{{"cmd", "export"}, {"in", a.in_file}, {"metric", a.metric}};
  const OutputMeta meta = make_meta(0, config);
  const ParsedLabels labels = parse_labels_csv(read_text_file(a.in_file));
  std::string metric = a.metric;
  if (metric.empty()) {
    for (const std::string& c : labels.columns) {
      if (c.rfind("label_", 0) == 0) {
        metric = c.substr(6);
        break;
      }
    }
    if (metric.empty() && !labels.rows.empty())
      throw ParseError("labels CSV has no label_<metric> column");
  }
  std::string svg = labeling_svg(labels, metric);
  const std::string comment = "<!-- qgeo version=" + std::string(meta.version) +
                              " config=" + meta.config_hash + " -->\n";
  svg.insert(svg.find('\n') + 1, comment);
  write_text_file(a.out_file, svg);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum state geometry: Voronoi labelings and channel capacity"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CoincideArgs co;
  CLI::App* coincide = app.add_subcommand("coincide", "compare Voronoi labelings");
  coincide->add_option("--suite", co.suite, "pure|mixed|section")
      ->check(CLI::IsMember({"pure", "mixed", "section"}));
  CLI::Option* dopt = coincide->add_option("--d", co.d, "state dimension");
  coincide->add_option("--random", co.random_k, "number of random sites");
  coincide->add_option("--sites", co.sites_file, "sites file (JSON state literals)");
  coincide->add_option("--seed", co.seed, "RNG seed");
  coincide->add_option("--samples", co.samples, "number of query samples");
  coincide->add_option("--eps", co.eps, "boundary band on the margin");
  coincide->add_option("--metrics", co.metrics,
                       "comma list: fs,bures_pure,bures,geodesic,euclid,div,divdual");
  coincide->add_option("--rmax", co.rmax, "mixed-suite ball radius");
  coincide->add_option("--variant", co.variant, "nearest|farthest")
      ->check(CLI::IsMember({"nearest", "farthest"}));
  coincide->add_flag("--expect-mismatch", co.expect_mismatch,
                     "succeed only if a non-band mismatch exists");
  coincide->add_option("--out", co.out_dir, "output directory");

  CapacityArgs ca;
  CLI::App* capacity = app.add_subcommand("capacity", "Holevo capacity of a qubit channel");
  capacity->add_option("--channel", ca.channel_file, "channel file (JSON)")->required();
  capacity->add_option("--points", ca.points, "sphere sample count");
  capacity->add_option("--tol", ca.tol, "convergence gap tolerance (nats)");
  capacity->add_option("--max-iter", ca.max_iter, "iteration cap");
  capacity->add_option("--seed", ca.seed, "seed recorded in metadata");
  capacity->add_flag("--bits", ca.bits, "print bits first");
  capacity->add_option("--out", ca.out_file, "output estimate JSON");

  SectionArgs se;
  CLI::App* section = app.add_subcommand("section", "bisector residual tables (d >= 3)");
  section->add_option("--d", se.d, "dimension");
  section->add_option("--seed", se.seed, "RNG seed");
  section->add_option("--pairs", se.pairs, "random site pairs");
  section->add_option("--grid", se.grid, "grid resolution per axis");
  section->add_option("--r", se.r, "shrink factor for pure sites");
  section->add_option("--out", se.out_dir, "output directory");

  ExportArgs ex;
  CLI::App* exp = app.add_subcommand("export", "render a labeling CSV as SVG");
  exp->add_option("--in", ex.in_file, "labeling CSV")->required();
  exp->add_option("--metric", ex.metric, "metric column to color by");
  exp->add_option("--out", ex.out_file, "output SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (coincide->parsed()) {
      co.d_given = dopt->count() > 0;
      return run_coincide(co);
    }
    if (capacity->parsed()) return run_capacity(ca);
    if (section->parsed()) return run_section(se);
    if (exp->parsed()) return run_export(ex);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NotCompletelyPositiveError& e) {
    std::cerr << "invalid channel: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
