#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "wlab/grid.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;  // stdout and stderr combined
};

fs::path wdir() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "wlab_cli_ws";
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  static int seq = 0;
  fs::path cap = wdir() / ("capture_" + std::to_string(seq++) + ".txt");
  std::string cmd = std::string("\"") + WLAB_CLI_PATH + "\" " + args +
                    " > \"" + cap.string() + "\" 2>&1";
  int st = std::system(cmd.c_str());
  RunResult r;
  if (st != -1 && WIFEXITED(st)) r.code = WEXITSTATUS(st);
  r.out = read_file(cap);
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

const std::string kFamily = "--a 1 --b 0.5 --c 0";

// Shared product grid, constructed once through the tool itself.
std::string product_grid_path() {
  static std::string path = [] {
    fs::path p = wdir() / "product64.json";
    RunResult r = run("construct product " + kFamily + " --out \"" +
                      p.string() + "\"");
    REQUIRE(r.code == 0);
    return p.string();
  }();
  return path;
}

}  // namespace

TEST_CASE("admissibility check splits families by exit code") {
  RunResult good = run("psi-check " + kFamily);
  CHECK(good.code == 0);
  nlohmann::json j = nlohmann::json::parse(good.out);
  CHECK(j["pass"] == true);
  CHECK(j["margins"]["slope_bound"] > 0.0);

  RunResult bad = run("psi-check --a 1 --b 1.5 --c 0");
  CHECK(bad.code == 1);
  CHECK(nlohmann::json::parse(bad.out)["pass"] == false);

  RunResult invalid = run("psi-check --a -1 --b 0 --c 0");
  CHECK(invalid.code == 2);
  CHECK(contains(invalid.out, "sqrt family"));
}

TEST_CASE("unknown flags are an input error") {
  CHECK(run("psi-check --bogus 3").code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("product construction writes a valid grid and its summary") {
  RunResult r = run("construct product " + kFamily + " --nt 32 --nth 32 --out \"" +
                    (wdir() / "p32.json").string() + "\"");
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["kind"] == "product");
  CHECK(std::abs(j["r"].get<double>() - 0.335710687) < 1e-6);
  wlab::TorusGrid g = wlab::load_grid((wdir() / "p32.json").string());
  CHECK(g.n_t == 32);
  CHECK(g.provenance == "product");
  g.validate();
}

TEST_CASE("an impossible family reports construction-not-found") {
  RunResult r = run("construct product --a 1 --b 1 --c 0 --out \"" +
                    (wdir() / "none.json").string() + "\"");
  CHECK(r.code == 3);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["error"] == "NoRoot");
  CHECK_FALSE(fs::exists(wdir() / "none.json"));
}

TEST_CASE("a bracket that never closes reports construction-not-found") {
  RunResult r = run("construct profile " + kFamily +
                    " --p 1 --q 2 --bracket 1.30,1.33 --out \"" +
                    (wdir() / "none2.json").string() + "\"");
  CHECK(r.code == 3);
  CHECK(contains(nlohmann::json::parse(r.out)["error"].get<std::string>(),
                 "NotFound"));
}

TEST_CASE("profile construction emits grid, summary and profile CSV") {
  fs::path grid = wdir() / "neck64.json";
  fs::path prof = wdir() / "neck64_profile.csv";
  RunResult r = run("construct profile " + kFamily +
                    " --p 1 --q 2 --bracket 0.7376,0.7854 --nt 64 --nth 64" +
                    " --out \"" + grid.string() + "\" --profile-out \"" +
                    prof.string() + "\"");
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["simple"] == true);
  CHECK(std::abs(j["dv_half"].get<double>() - M_PI / 2) < 1e-9);
  wlab::load_grid(grid.string()).validate();
  std::string csv = read_file(prof);
  CHECK(contains(csv, "u"));
  CHECK(csv.find('\n') != std::string::npos);
}

TEST_CASE("verification passes the product torus end to end") {
  fs::path rep1 = wdir() / "rep1.json", rep2 = wdir() / "rep2.json";
  fs::path plots = wdir() / "plots";
  RunResult r =
      run("verify --grid \"" + product_grid_path() + "\" " + kFamily +
          " --zero-timings --report \"" + rep1.string() + "\" --plots \"" +
          plots.string() + "\"");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "weingarten"));
  CHECK(contains(r.out, "overall"));
  CHECK_FALSE(contains(r.out, "FAIL"));

  nlohmann::json j = nlohmann::json::parse(read_file(rep1));
  CHECK(j["overall_pass"] == true);
  CHECK(j["grid"]["provenance"] == "product");
  CHECK(j["timings_ms"]["total"] == 0.0);

  for (const char* f : {"curvature_profile.csv", "zmin_slice.csv",
                        "singular_values.csv", "phi.csv"})
    CHECK(fs::exists(plots / f));

  // Identical inputs with zeroed timings give byte-identical reports.
  RunResult r2 = run("verify --grid \"" + product_grid_path() + "\" " +
                     kFamily + " --zero-timings --report \"" + rep2.string() +
                     "\"");
  CHECK(r2.code == 0);
  CHECK(read_file(rep1) == read_file(rep2));
}

TEST_CASE("a mismatched curvature relation fails verification honestly") {
  RunResult r = run("verify --grid \"" + product_grid_path() +
                    "\" --a 4 --b 0 --c 0 --report \"" +
                    (wdir() / "rep_bad.json").string() + "\"");
  CHECK(r.code == 1);
  CHECK(contains(r.out, "FAIL"));
  nlohmann::json j = nlohmann::json::parse(read_file(wdir() / "rep_bad.json"));
  CHECK(j["overall_pass"] == false);
  bool wein_failed = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "weingarten") wein_failed = !c["pass"].get<bool>();
  CHECK(wein_failed);
}

TEST_CASE("corrupted grids are an input error, not a check failure") {
  nlohmann::json j = nlohmann::json::parse(read_file(product_grid_path()));
  j["points"][5][0] = j["points"][5][0].get<double>() * 1.25;
  fs::path bad = wdir() / "corrupt.json";
  std::ofstream(bad) << j.dump();
  RunResult r = run("verify --grid \"" + bad.string() + "\" " + kFamily);
  CHECK(r.code == 2);
  CHECK(contains(r.out, "unit sphere"));

  CHECK(run("verify --grid /no/such/grid.json " + kFamily).code == 2);
}

TEST_CASE("parameter sweep writes one labeled row per combination") {
  fs::path csv = wdir() / "sweep.csv";
  RunResult r = run("scan --a-list 1 --b-list 0.5,1 --c-list 0 --out \"" +
                    csv.string() + "\"");
  CHECK(r.code == 0);
  std::string text = read_file(csv);
  CHECK(contains(text, "a,b,c,structure_pass"));
  CHECK(contains(text, "ok,"));      // (1, 0.5, 0) constructs
  CHECK(contains(text, "NoRoot"));   // (1, 1, 0) does not
  int lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header + two rows
}
