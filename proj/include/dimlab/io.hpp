#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimlab/core.hpp"
#include "dimlab/estimators.hpp"
#include "dimlab/measure.hpp"

namespace dimlab {

using json = nlohmann::ordered_json;

// Machine output carries floats at 12 significant digits: values are
// re-parsed from their %.12g form before entering a document, so repeated
// runs serialize byte-identically.
inline double round12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline json json_num(double v) { return json(round12(v)); }

// write-temp-then-rename so concurrent readers never see a partial file
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

namespace detail {

inline std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ParsedPointFile {
  std::vector<std::vector<double>> rows;
  FixtureMeta meta;
  bool has_meta_scale = false;
  std::optional<Metric> metric;
};

inline ParsedPointFile parse_point_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  ParsedPointFile parsed;
  parsed.meta.name = path.stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) {
      std::istringstream meta_s(line.substr(pos + 1));
      std::string tag, key;
      if (meta_s >> tag >> key && tag == "meta") {
        std::string value;
        std::getline(meta_s, value);
        const auto b = value.find_first_not_of(" \t");
        if (b != std::string::npos) value = value.substr(b);
        if (key == "name") parsed.meta.name = value;
        else if (key == "kind") parsed.meta.kind = value;
        else if (key == "metric") parsed.metric = metric_from_name(value);
        else if (key == "scale_factor") {
          parsed.meta.scale_factor = std::strtod(value.c_str(), nullptr);
          parsed.has_meta_scale = true;
        } else if (key == "mesh") parsed.meta.mesh = std::strtod(value.c_str(), nullptr);
        else if (key == "dedup_eps") parsed.meta.dedup_eps = std::strtod(value.c_str(), nullptr);
      }
      line.erase(pos);
    }
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream row_s(line);
    std::vector<double> row;
    double v;
    while (row_s >> v) row.push_back(v);
    if (!row.empty()) parsed.rows.push_back(std::move(row));
  }
  if (parsed.rows.empty()) throw InputError("no points in " + path.string());
  const std::size_t width = parsed.rows.front().size();
  for (const auto& r : parsed.rows)
    if (r.size() != width)
      throw InputError("inconsistent column count in " + path.string());
  return parsed;
}

}  // namespace detail

/// Point-cloud file: one point per line, coordinates separated by commas or
/// whitespace, '#' begins a comment; "# meta <key> <value>" lines carry the
/// fixture metadata. The loader normalizes to diameter <= 1 and records the
/// factor.
inline std::shared_ptr<PointCloud> load_points(const std::filesystem::path& path) {
  detail::ParsedPointFile parsed = detail::parse_point_file(path);
  const int dim = static_cast<int>(parsed.rows.front().size());
  std::vector<double> coords;
  coords.reserve(parsed.rows.size() * dim);
  for (const auto& r : parsed.rows)
    coords.insert(coords.end(), r.begin(), r.end());
  const Metric metric = parsed.metric.value_or(Metric::euclidean);
  return std::make_shared<PointCloud>(
      finalize_cloud(std::move(coords), dim, metric, std::move(parsed.meta)));
}

/// Measure file: point format with an extra final column holding the weight.
inline DiscreteMeasure load_measure(const std::filesystem::path& path) {
  detail::ParsedPointFile parsed = detail::parse_point_file(path);
  const int width = static_cast<int>(parsed.rows.front().size());
  if (width < 2) throw InputError("measure file needs coordinates plus a weight column");
  const int dim = width - 1;
  std::vector<double> coords;
  std::vector<double> weights;
  for (const auto& r : parsed.rows) {
    coords.insert(coords.end(), r.begin(), r.end() - 1);
    weights.push_back(r.back());
  }
  for (double w : weights)
    if (!(w > 0)) throw InputError("weights must be positive");
  const Metric metric = parsed.metric.value_or(Metric::euclidean);
  // normalize alongside the host cloud; weights are untouched
  PointCloud normalized =
      finalize_cloud(coords, dim, metric, parsed.meta);
  if (normalized.size() != static_cast<int>(weights.size()))
    throw InputError("duplicate atom positions in measure file");
  auto host = std::make_shared<PointCloud>(std::move(normalized));
  return DiscreteMeasure(std::move(host), std::move(weights), /*full_support=*/true);
}

inline std::string point_file_header(const PointCloud& cloud,
                                     const std::string& format) {
  std::ostringstream out;
  out << "# dimlab " << format << " v1\n";
  const FixtureMeta& m = cloud.meta();
  if (!m.name.empty()) out << "# meta name " << m.name << "\n";
  if (!m.kind.empty()) out << "# meta kind " << m.kind << "\n";
  out << "# meta metric " << metric_name(cloud.metric()) << "\n";
  out << "# meta scale_factor " << detail::format_g(m.scale_factor) << "\n";
  out << "# meta mesh " << detail::format_g(m.mesh) << "\n";
  out << "# meta dedup_eps " << detail::format_g(m.dedup_eps) << "\n";
  return out.str();
}

inline void save_points(const PointCloud& cloud,
                        const std::filesystem::path& path) {
  std::ostringstream out;
  out << point_file_header(cloud, "points");
  for (int i = 0; i < cloud.size(); ++i) {
    auto p = cloud.point(i);
    for (std::size_t k = 0; k < p.size(); ++k)
      out << (k ? " " : "") << detail::format_g(p[k]);
    out << "\n";
  }
  atomic_write(path, out.str());
}

inline void save_measure(const DiscreteMeasure& mu,
                         const std::filesystem::path& path) {
  std::ostringstream out;
  out << point_file_header(mu.host(), "measure");
  for (int i = 0; i < mu.host().size(); ++i) {
    if (!(mu.weights()[i] > 0)) continue;
    auto p = mu.host().point(i);
    for (std::size_t k = 0; k < p.size(); ++k)
      out << (k ? " " : "") << detail::format_g(p[k]);
    out << " " << detail::format_g(mu.weights()[i]) << "\n";
  }
  atomic_write(path, out.str());
}

inline json estimate_to_json(const DimensionEstimate& est) {
  json j;
  j["quantity"] = quantity_name(est.quantity);
  j["value"] = json_num(est.value);
  j["raw_value"] = json_num(est.raw_value);
  if (est.theta) j["theta"] = json_num(*est.theta);
  if (est.q) j["q"] = json_num(*est.q);
  j["report"] = {{"global_ls", json_num(est.report.global_ls)},
                 {"upper_env", json_num(est.report.upper_env)},
                 {"lower_env", json_num(est.report.lower_env)},
                 {"window", est.report.window},
                 {"dropped_rows", est.report.dropped_rows}};
  j["grid"] = {{"r_max", json_num(est.grid.r_max)},
               {"r_min", json_num(est.grid.r_min)},
               {"per_octave", est.grid.per_octave}};
  j["mesh_warning"] = est.mesh_warning;
  return j;
}

inline json spectrum_to_json(const SpectrumCurve& curve) {
  json j;
  j["quantity"] = quantity_name(curve.quantity);
  j["fixture"] = curve.fixture;
  json params = json::array(), values = json::array(), ests = json::array();
  for (std::size_t i = 0; i < curve.parameter.size(); ++i) {
    params.push_back(json_num(curve.parameter[i]));
    values.push_back(json_num(curve.estimates[i].value));
    ests.push_back(estimate_to_json(curve.estimates[i]));
  }
  j["theta_or_q"] = params;
  j["value"] = values;
  j["estimates"] = ests;
  return j;
}

/// LogLogTable CSV: r, value, log_r, log_value.
inline std::string table_to_csv(const LogLogTable& table) {
  std::ostringstream out;
  out << "r,value,log_r,log_value\n";
  char buf[200];
  for (int i = 0; i < table.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n",
                  std::exp(table.log_r[i]), std::exp(table.log_v[i]),
                  table.log_r[i], table.log_v[i]);
    out << buf;
  }
  return out.str();
}

inline std::string spectrum_to_csv(const SpectrumCurve& curve) {
  std::ostringstream out;
  out << "parameter,value,raw_value\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.parameter.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", curve.parameter[i],
                  curve.estimates[i].value, curve.estimates[i].raw_value);
    out << buf;
  }
  return out.str();
}

}  // namespace dimlab
