#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "helpers.hpp"
#include "wlab/errors.hpp"
#include "wlab/grid.hpp"
#include "wlab/report.hpp"

using namespace wlab;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

bool same_points(const TorusGrid& a, const TorusGrid& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t p = 0; p < a.points.size(); ++p)
    for (int c = 0; c < 4; ++c) {
      double x = a.points[p][c], y = b.points[p][c];
      if (std::memcmp(&x, &y, sizeof(double)) != 0) return false;
    }
  return true;
}

TorusGrid unit_grid(std::size_t n) {
  TorusGrid g;
  g.n_t = g.n_th = n;
  g.provenance = "external";
  g.points.assign(n * n, Vec4{{1.0, 0.0, 0.0, 0.0}});
  return g;
}

}  // namespace

TEST_CASE("grid files roundtrip bit for bit") {
  const TorusGrid& g = wt::product_grid(16);
  auto path = temp_file("wlab_roundtrip.json");
  save_grid(g, path.string());
  TorusGrid r = load_grid(path.string());
  CHECK(r.n_t == g.n_t);
  CHECK(r.n_th == g.n_th);
  CHECK(r.provenance == g.provenance);
  // Metadata values may be re-rendered by the parser (shortest-roundtrip
  // floats), so compare them as parsed values, not raw strings.
  REQUIRE(r.metadata.size() == g.metadata.size());
  for (std::size_t k = 0; k < g.metadata.size(); ++k) {
    CHECK(r.metadata[k].first == g.metadata[k].first);
    CHECK(nlohmann::json::parse(r.metadata[k].second) ==
          nlohmann::json::parse(g.metadata[k].second));
  }
  CHECK(same_points(r, g));
  fs::remove(path);
}

TEST_CASE("grid serialization is deterministic") {
  const TorusGrid& g = wt::product_grid(16);
  std::string a = grid_to_json(g);
  std::string b = grid_to_json(g);
  CHECK(a == b);
  TorusGrid r = grid_from_json(a, "inline");
  CHECK(same_points(r, g));
}

TEST_CASE("validation rejects malformed grids") {
  TorusGrid g = unit_grid(4);
  CHECK_THROWS_AS(g.validate(), Error);  // too small

  g = unit_grid(8);
  g.points.pop_back();
  CHECK_THROWS_AS(g.validate(), Error);  // count mismatch

  g = unit_grid(8);
  g.provenance = "telepathy";
  CHECK_THROWS_AS(g.validate(), Error);

  g = unit_grid(8);
  g.points[5][2] = std::nan("");
  CHECK_THROWS_AS(g.validate(), Error);

  g = unit_grid(8);
  g.points[7] = Vec4{{0.5, 0.0, 0.0, 0.0}};
  try {
    g.validate();
    FAIL("expected unit-sphere failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("unit sphere") != std::string::npos);
  }
}

TEST_CASE("newer schema versions are refused") {
  nlohmann::json j = nlohmann::json::parse(grid_to_json(unit_grid(8)));
  j["schema_version"] = 99;
  try {
    grid_from_json(j.dump(), "inline");
    FAIL("expected schema refusal");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("schema version") != std::string::npos);
  }
}

TEST_CASE("parse failures carry the origin") {
  CHECK_THROWS_AS(grid_from_json("this is not json", "somewhere"), Error);
  try {
    grid_from_json("{\"n_t\": 8, \"n_th\": 8, \"points\": [[1, 0, 0]]}",
                   "short-point");
    FAIL("expected point-shape failure");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("4 components") != std::string::npos);
  }
  CHECK_THROWS_AS(load_grid("/no/such/dir/grid.json"), Error);
}

TEST_CASE("report renders with fixed shape and honest conjunction") {
  VerificationReport rep;
  rep.psi = wt::spec1050();
  rep.n_t = 64;
  rep.n_th = 64;
  rep.provenance = "product";
  rep.grid_metadata.emplace_back("psi_a", "1");
  rep.checks.push_back({"alpha_check", true, "{\"max\":0.5}"});
  rep.checks.push_back({"beta_check", false, "{\"max\":2.0}"});
  rep.timings_ms.emplace_back("total", 123.0);

  CHECK_FALSE(rep.overall_pass());
  std::string text = report_json(rep);
  CHECK(text == report_json(rep));  // deterministic

  nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["tool_version"] == kToolVersion);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["psi"]["kind"] == "sqrt_family");
  CHECK(j["psi"]["b"] == 0.5);
  CHECK(j["grid"]["n_t"] == 64);
  CHECK(j["grid"]["metadata"]["psi_a"] == 1);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["name"] == "alpha_check");
  CHECK(j["checks"][1]["pass"] == false);
  CHECK(j["checks"][1]["data"]["max"] == 2.0);
  CHECK(j["overall_pass"] == false);
  CHECK(j["timings_ms"]["total"] == 123.0);

  rep.zero_timings = true;
  nlohmann::json z = nlohmann::json::parse(report_json(rep));
  CHECK(z["timings_ms"]["total"] == 0.0);

  rep.checks[1].pass = true;
  CHECK(rep.overall_pass());
}

TEST_CASE("residual payload keeps its refine trail") {
  ResidualSummary r;
  r.name = "example";
  r.max_abs = 0.25;
  r.mean_abs = 0.125;
  r.arg_i = 3;
  r.arg_j = 4;
  r.tolerance = 0.5;
  r.pass = true;
  r.refine = {{64, 0.5}, {128, 0.25}};
  nlohmann::json j = nlohmann::json::parse(residual_json(r, 128));
  CHECK(j["name"] == "example");
  CHECK(j["arg"][0] == 3);
  CHECK(j["resolution"] == 128);
  CHECK(j["refine"][1][1] == 0.25);
  CHECK(j["pass"] == true);
}

TEST_CASE("text files fail loudly on unwritable paths") {
  CHECK_THROWS_AS(write_text_file("/no/such/dir/out.txt", "x"), Error);
  auto path = temp_file("wlab_text.txt");
  write_text_file(path.string(), "payload\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "payload");
  fs::remove(path);
}
