#include "wlab/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wlab/errors.hpp"
#include "wlab/jsonw.hpp"

namespace wlab {

void TorusGrid::set_meta(const std::string& k, double v) {
  metadata.emplace_back(k, JsonWriter::num(v));
}

void TorusGrid::set_meta_int(const std::string& k, long long v) {
  metadata.emplace_back(k, std::to_string(v));
}

void TorusGrid::set_meta_str(const std::string& k, const std::string& v) {
  metadata.emplace_back(k, "\"" + v + "\"");
}

void TorusGrid::validate() const {
  if (n_t < 8 || n_th < 8) raise(ErrorCode::BadInput, "grid needs n_t, n_th >= 8");
  if (points.size() != n_t * n_th)
    raise(ErrorCode::BadInput, "grid point count does not match n_t * n_th");
  if (provenance != "product" && provenance != "profile" && provenance != "external")
    raise(ErrorCode::BadInput, "unknown provenance '" + provenance + "'");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec4& p = points[k];
    for (int c = 0; c < 4; ++c)
      if (!std::isfinite(p[c])) raise(ErrorCode::BadInput, "non-finite grid point");
    if (std::abs(dot(p, p) - 1.0) > 1e-8)
      raise(ErrorCode::BadInput,
            "grid point " + std::to_string(k) + " is not on the unit sphere");
  }
}

std::string grid_to_json(const TorusGrid& g) {
  JsonWriter w;
  w.begin_obj();
  w.kv("schema_version", kSchemaVersion);
  w.kv("n_t", g.n_t);
  w.kv("n_th", g.n_th);
  w.kv("provenance", g.provenance);
  w.key("metadata");
  w.begin_obj();
  for (const auto& [k, raw] : g.metadata) {
    w.key(k);
    w.value_raw(raw);
  }
  w.end_obj();
  w.key("points");
  w.begin_arr();
  for (const Vec4& p : g.points) {
    w.begin_arr();
    for (int c = 0; c < 4; ++c) w.value_num(p[c]);
    w.end_arr();
  }
  w.end_arr();
  w.end_obj();
  return w.str();
}

TorusGrid grid_from_json(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    raise(ErrorCode::BadInput, "cannot parse " + origin + ": " + e.what());
  }
  TorusGrid g;
  try {
    if (j.contains("schema_version")) {
      const long long v = j.at("schema_version").get<long long>();
      if (v > kSchemaVersion)
        raise(ErrorCode::BadInput, "grid schema version " + std::to_string(v) +
                                       " is newer than supported " +
                                       std::to_string(kSchemaVersion));
    }
    g.n_t = j.at("n_t").get<std::size_t>();
    g.n_th = j.at("n_th").get<std::size_t>();
    g.provenance = j.value("provenance", std::string("external"));
    if (j.contains("metadata")) {
      for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
        g.metadata.emplace_back(it.key(), it.value().dump());
    }
    const auto& pts = j.at("points");
    g.points.reserve(pts.size());
    for (const auto& row : pts) {
      if (!row.is_array() || row.size() != 4)
        raise(ErrorCode::BadInput, "each point must have 4 components");
      Vec4 p;
      for (int c = 0; c < 4; ++c) p[c] = row[c].get<double>();
      g.points.push_back(p);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    raise(ErrorCode::BadInput, "malformed grid in " + origin + ": " + e.what());
  }
  g.validate();
  return g;
}

TorusGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::BadInput, "cannot open grid file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return grid_from_json(ss.str(), path);
}

void save_grid(const TorusGrid& g, const std::string& path) {
  g.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::BadInput, "cannot write grid file " + path);
  out << grid_to_json(g) << "\n";
}

}  // namespace wlab
