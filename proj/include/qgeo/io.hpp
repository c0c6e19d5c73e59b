#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgeo/capacity.hpp"
#include "qgeo/distances.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/states.hpp"
#include "qgeo/version.hpp"
#include "qgeo/voronoi.hpp"

namespace qgeo {

using json = nlohmann::ordered_json;

/// Shortest exact decimal representation; used for every CSV number so that
/// reruns are byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// FNV-1a over the canonical configuration string.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct OutputMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string version = kVersion;
};

inline json meta_json(const OutputMeta& m) {
  return json{{"seed", m.seed}, {"config_hash", m.config_hash}, {"version", m.version}};
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

// ---------------------------------------------------------------------------
// state literals: {"bloch":[x,y,z]} | {"xi":{"d":d,"values":[...]}} |
//                 {"matrix":[[[re,im],...],...]}
// ---------------------------------------------------------------------------

inline ComplexMatrix parse_complex_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw ParseError("matrix literal: expected array of rows");
  const std::size_t d = rows.size();
  if (d > kMaxDim) throw ParseError("matrix literal: dimension too large");
  ComplexMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!rows[i].is_array() || rows[i].size() != d)
      throw ParseError("matrix literal: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < d; ++j) {
      const json& e = rows[i][j];
      if (!e.is_array() || e.size() != 2)
        throw ParseError("matrix literal: entries must be [re, im] pairs");
      m(i, j) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline json complex_matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline DensityMatrix parse_state(const json& j) {
  if (!j.is_object()) throw ParseError("state literal must be an object");
  if (j.contains("bloch")) {
    const json& b = j["bloch"];
    if (!b.is_array() || b.size() != 3) throw ParseError("bloch literal needs 3 numbers");
    return bloch_to_density(
        BlochVector{b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
  }
  if (j.contains("xi")) {
    const json& x = j["xi"];
    if (!x.contains("d") || !x.contains("values")) throw ParseError("xi literal needs d, values");
    XiVector xi;
    xi.dim = x["d"].get<std::size_t>();
    xi.values = x["values"].get<std::vector<double>>();
    return DensityMatrix::from_matrix(xi_to_matrix(xi));
  }
  if (j.contains("matrix")) {
    return DensityMatrix::from_matrix(parse_complex_matrix(j["matrix"]));
  }
  throw ParseError("state literal must contain one of: bloch, xi, matrix");
}

inline std::vector<DensityMatrix> parse_sites(const json& j) {
  const json& arr = j.is_object() && j.contains("sites") ? j["sites"] : j;
  if (!arr.is_array()) throw ParseError("sites file: expected a JSON array of state literals");
  std::vector<DensityMatrix> out;
  for (const json& e : arr) out.push_back(parse_state(e));
  return out;
}

inline std::vector<DensityMatrix> load_sites_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("sites file " + path + ": " + e.what());
  }
  return parse_sites(j);
}

// ---------------------------------------------------------------------------
// channel files: {"affine": {"M": 3x3, "t": [3]}} or {"kraus": [K, ...]}
// ---------------------------------------------------------------------------

inline QubitChannel parse_channel(const json& j) {
  if (j.contains("affine")) {
    const json& a = j["affine"];
    if (!a.contains("M") || !a.contains("t")) throw ParseError("affine channel needs M and t");
    const json& mj = a["M"];
    if (!mj.is_array() || mj.size() != 3) throw ParseError("affine channel: M must be 3x3");
    Mat3 m;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!mj[i].is_array() || mj[i].size() != 3)
        throw ParseError("affine channel: M must be 3x3");
      for (std::size_t k = 0; k < 3; ++k) m(i, k) = mj[i][k].get<double>();
    }
    const json& tj = a["t"];
    if (!tj.is_array() || tj.size() != 3) throw ParseError("affine channel: t must have 3 entries");
    return QubitChannel::from_affine(
        m, BlochVector{tj[0].get<double>(), tj[1].get<double>(), tj[2].get<double>()});
  }
  if (j.contains("kraus")) {
    std::vector<ComplexMatrix> ops;
    for (const json& kj : j["kraus"]) ops.push_back(parse_complex_matrix(kj));
    return QubitChannel::from_kraus(ops);
  }
  throw ParseError("channel file must contain 'affine' or 'kraus'");
}

inline QubitChannel load_channel_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("channel file " + path + ": " + e.what());
  }
  return parse_channel(j);
}

// ---------------------------------------------------------------------------
// capacity estimate
// ---------------------------------------------------------------------------

inline json estimate_to_json(const CapacityEstimate& est, const std::vector<DensityMatrix>& points,
                             const OutputMeta& meta) {
  json support = json::array();
  const ComplexMatrix lc = density_log(est.center);
  for (std::size_t i = 0; i < est.support_weights.size(); ++i) {
    if (est.support_weights[i] <= 0.0) continue;
    const double dv =
        divergence_from_parts(state_neg_entropy(points[i]), points[i].matrix(), lc);
    support.push_back(
        json{{"index", i}, {"weight", est.support_weights[i]}, {"divergence", dv}});
  }
  const BlochVector cb = density_to_bloch(est.center);
  return json{{"meta", meta_json(meta)},
              {"radius_nats", est.radius_nats},
              {"radius_bits", est.radius_nats / std::numbers::ln2},
              {"center_bloch", json::array({cb.x, cb.y, cb.z})},
              {"n_points", points.size()},
              {"iterations", est.iterations},
              {"residual", est.residual},
              {"support", std::move(support)}};
}

// ---------------------------------------------------------------------------
// labeling CSV: comment line with metadata, then
// sample_index,<coords...>,label_<kind>,margin_<kind>,boundary_<kind>,...
// ---------------------------------------------------------------------------

inline std::string labels_csv(const OutputMeta& meta, const std::vector<std::string>& coord_names,
                              const std::vector<std::vector<double>>& coords,
                              const std::vector<std::pair<DistanceKind, Labeling>>& labelings) {
  std::ostringstream out;
  out << "# qgeo version=" << meta.version << " seed=" << meta.seed
      << " config=" << meta.config_hash << "\n";
  out << "sample_index";
  for (const std::string& c : coord_names) out << "," << c;
  for (const auto& [kind, lab] : labelings) {
    (void)lab;
    const char* name = to_string(kind);
    out << ",label_" << name << ",margin_" << name << ",boundary_" << name;
  }
  out << "\n";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out << i;
    for (double c : coords[i]) out << "," << format_double(c);
    for (const auto& [kind, lab] : labelings) {
      (void)kind;
      out << "," << lab.assignment[i] << "," << format_double(lab.margin[i]) << ","
          << static_cast<int>(lab.boundary[i]);
    }
    out << "\n";
  }
  return out.str();
}

struct ParsedLabels {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw ParseError("labels CSV: missing column " + name);
  }
};

inline ParsedLabels parse_labels_csv(const std::string& text) {
  ParsedLabels out;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      out.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != out.columns.size())
      throw ParseError("labels CSV: row has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(out.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ParseError("labels CSV: bad number '" + c + "'");
      }
    }
    out.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("labels CSV: missing header");
  return out;
}

// ---------------------------------------------------------------------------
// agreement reports
// ---------------------------------------------------------------------------

inline json agreement_to_json(const AgreementReport& r) {
  return json{{"compared", r.compared},
              {"mismatches", r.mismatches},
              {"mismatch_indices", r.mismatch_indices},
              {"band", r.band}};
}

// ---------------------------------------------------------------------------
// SVG export: equirectangular projection of a sphere labeling
// ---------------------------------------------------------------------------

inline const char* label_color(std::size_t label) {
  static const char* palette[12] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                    "#76b7b2", "#edc948", "#b07aa1", "#ff9da7",
                                    "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
  return palette[label % 12];
}

/// One dot per sample at (longitude, latitude); boundary-band samples in
/// neutral gray. Deterministic for fixed input.
inline std::string labeling_svg(const ParsedLabels& labels, const std::string& metric) {
  constexpr double w = 800.0;
  constexpr double h = 400.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n";
  svg << "<rect width=\"800\" height=\"400\" fill=\"#ffffff\"/>\n";
  if (!labels.rows.empty()) {
    const std::size_t cx = labels.column("x");
    const std::size_t cy = labels.column("y");
    const std::size_t cz = labels.column("z");
    const std::size_t cl = labels.column("label_" + metric);
    const std::size_t cb = labels.column("boundary_" + metric);
    for (const std::vector<double>& row : labels.rows) {
      const double lon = std::atan2(row[cy], row[cx]);
      const double lat = std::asin(std::min(1.0, std::max(-1.0, row[cz])));
      const double px = (lon / (2.0 * std::numbers::pi) + 0.5) * w;
      const double py = (0.5 - lat / std::numbers::pi) * h;
      const bool boundary = row[cb] != 0.0;
      const char* fill =
          boundary ? "#999999" : label_color(static_cast<std::size_t>(row[cl]));
      char buf[160];
      std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                    px, py, fill);
      svg << buf;
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qgeo
