// weinlab: build rotationally symmetric Weingarten tori in the unit sphere
// and verify the pointwise identities, the two-point nonnegativity and the
// rotational symmetry chain on them.
//
// Subcommands:
//   psi-check   admissibility margins of a curvature relation
//   construct   product or closed-profile torus -> grid JSON
//   verify      full check pipeline on a grid -> report JSON, exit 0 iff pass
//   scan        (a, b, c) parameter sweep -> summary CSV
//
// Exit codes: 0 pass, 1 check failure, 2 input error, 3 construction not
// found.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "wlab/errors.hpp"
#include "wlab/grid.hpp"
#include "wlab/identities.hpp"
#include "wlab/jsonw.hpp"
#include "wlab/psi.hpp"
#include "wlab/report.hpp"
#include "wlab/rotational.hpp"
#include "wlab/surface.hpp"
#include "wlab/symmetry.hpp"
#include "wlab/two_point.hpp"

namespace {

using namespace wlab;

// Verdict thresholds for the verify stages whose outputs are not
// ResidualSummary values (those carry their own tolerances).
constexpr double kMinSpreadFloor = 1e-8;   // umbilic-free verdict
constexpr double kScanTol = 1e-6;          // min Z_1 >= -kScanTol
constexpr double kKappaThreshold = 1.005;  // allowed excess of kappa* over 1
constexpr double kKappaPairTol = 1e-6;     // per-pair tolerance inside kappa*
constexpr double kReflectionTol = 1e-4;    // mirror residual on the normal
constexpr double kTangencyTol = 1e-6;      // |<QF, nu>| and |<QF, F>| bounds
constexpr double kQFitBase = 1e-3;         // times (128/N)^2
constexpr double kLieBase = 1e-6;          // times scale^3 (128/N)^2

int exit_code_for(const Error& e, bool constructing) {
  switch (e.code()) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::BadInput:
    case ErrorCode::OutOfRange:
      return 2;
    case ErrorCode::NoRoot:
    case ErrorCode::NotFound:
    case ErrorCode::OpenProfile:
    case ErrorCode::BandExit:
    case ErrorCode::StepFailure:
    case ErrorCode::ConvergenceFailure:
      return constructing ? 3 : 1;
    default:
      return 1;
  }
}

std::string error_json(const Error& e) {
  JsonWriter w;
  w.begin_obj();
  w.kv("error", std::string(error_code_name(e.code())));
  w.kv("message", std::string(e.what()));
  w.end_obj();
  return w.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string tok = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      raise(ErrorCode::BadInput,
            std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
    pos = comma + 1;
  }
  if (out.empty()) raise(ErrorCode::BadInput, std::string(what) + ": empty list");
  return out;
}

struct PsiFlags {
  double a = 1.0, b = 0.0, c = 0.0;
  std::string table;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a", a, "sqrt-family offset under the root");
    cmd->add_option("--b", b, "sqrt-family quadratic coefficient");
    cmd->add_option("--c", c, "sqrt-family additive constant");
    cmd->add_option("--table", table, "CSV table of s, psi, psi', psi''");
  }

  PsiSpec make() const {
    if (!table.empty()) return PsiSpec::tabulated_from_csv(table);
    return PsiSpec::sqrt_family(a, b, c);
  }
};

// ---------------------------------------------------------------- psi-check

int cmd_psi_check(const PsiFlags& pf, double smax, std::size_t n) {
  PsiSpec spec = pf.make();
  StructureReport r = check_structure(spec, smax, n);
  std::printf("%s\n", structure_json(r).c_str());
  return r.pass ? 0 : 1;
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string kind;
  PsiFlags pf;
  std::string mode = "quick";
  std::size_t nt = 0, nth = 0;
  long long p = 1, q = 2;
  std::string bracket;
  std::string out;
  std::string profile_out;
};

int cmd_construct(const ConstructArgs& ca) {
  std::size_t nt = ca.nt, nth = ca.nth;
  const std::size_t mode_n = ca.mode == "full" ? 128 : 64;
  if (nt == 0) nt = mode_n;
  if (nth == 0) nth = mode_n;

  PsiSpec spec = ca.pf.make();
  JsonWriter w;
  w.begin_obj();
  if (ca.kind == "product") {
    ProductTorus pt = product_torus(spec);
    TorusGrid grid = emit_product_grid(spec, pt, nt, nth);
    save_grid(grid, ca.out);
    w.kv("kind", std::string("product"));
    w.kv("r", pt.r);
    w.kv("lambda1", pt.lambda1);
    w.kv("lambda2", pt.lambda2);
  } else {
    if (ca.bracket.empty())
      raise(ErrorCode::BadInput, "profile construction needs --bracket lo,hi");
    std::vector<double> br = parse_list(ca.bracket, "--bracket");
    if (br.size() != 2 || !(br[0] < br[1]))
      raise(ErrorCode::BadInput, "--bracket must be lo,hi with lo < hi");
    ProfileCurve pc = close_profile(spec, ca.p, ca.q, br[0], br[1]);
    TorusGrid grid = emit_grid(pc, nt, nth);
    save_grid(grid, ca.out);
    if (!ca.profile_out.empty()) save_profile_csv(pc, ca.profile_out);
    w.kv("kind", std::string("profile"));
    w.kv("u0", pc.u0);
    w.kv("p", pc.p);
    w.kv("q", pc.q);
    w.kv("dv_half", pc.dv_half);
    w.kv("length", pc.length);
    w.kv("closure_residual", pc.closure_residual);
    w.kv("simple", pc.simple);
  }
  w.kv("n_t", nt);
  w.kv("n_th", nth);
  w.kv("out", ca.out);
  w.end_obj();
  std::printf("%s\n", w.str().c_str());
  return 0;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string grid_path;
  PsiFlags pf;
  std::string alpha_list = "1.25,2,4";
  std::size_t coarse = 4;
  std::string report_path;
  std::string plots_dir;
  bool zero_timings = false;
};

std::string umbilic_json(const UmbilicDiagnostics& ud, bool frames_ok) {
  JsonWriter w;
  w.begin_obj();
  w.kv("min_spread", ud.min_spread);
  w.key("winding_t");
  if (std::isfinite(ud.winding_t)) w.value_num(ud.winding_t);
  else w.value_raw("null");
  w.key("winding_th");
  if (std::isfinite(ud.winding_th)) w.value_num(ud.winding_th);
  else w.value_raw("null");
  w.kv("frames_ok", frames_ok);
  w.kv("tolerance", kMinSpreadFloor);
  w.end_obj();
  return w.str();
}

std::string barrier_json(const BarrierScan& bs, std::size_t n) {
  JsonWriter w;
  w.begin_obj();
  w.kv("alpha", bs.alpha);
  w.kv("max", bs.lhs.max_abs);
  w.kv("margin", -bs.lhs.tolerance);
  w.key("arg");
  w.begin_arr();
  w.value_int(static_cast<long long>(bs.lhs.arg_i));
  w.value_int(static_cast<long long>(bs.lhs.arg_j));
  w.end_arr();
  w.kv("min_beta_lambda", bs.min_beta_lambda);
  w.kv("resolution", n);
  w.kv("pass", bs.lhs.pass);
  w.end_obj();
  return w.str();
}

std::string kappa_json(double value, bool pass) {
  JsonWriter w;
  w.begin_obj();
  w.kv("value", value);
  w.kv("alpha_tolerance", 1e-3);
  w.kv("pair_tolerance", kKappaPairTol);
  w.kv("threshold", kKappaThreshold);
  w.kv("pass", pass);
  w.end_obj();
  return w.str();
}

std::string failed_stage_json(const Error& e) {
  JsonWriter w;
  w.begin_obj();
  w.kv("error", std::string(error_code_name(e.code())));
  w.kv("message", std::string(e.what()));
  w.kv("pass", false);
  w.end_obj();
  return w.str();
}

void add_residual(VerificationReport& rep, const ResidualSummary& r,
                  std::size_t n) {
  rep.checks.push_back({r.name, r.pass, residual_json(r, n)});
}

void emit_plots(const std::string& dir, const TorusGrid& grid,
                const CurvatureField& cf, const TwoPointScan& s1,
                const SymmetryFit* fit, const PhiTable* phi) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string sep = ",";

  // Curvature profile along the th axis at t index 0.
  {
    std::string csv = "j,theta,lambda1,lambda2,beta1,beta2,spread\n";
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double th = 2.0 * M_PI * static_cast<double>(j) /
                        static_cast<double>(cf.n_th);
      csv += std::to_string(j) + sep + JsonWriter::num(th) + sep +
             JsonWriter::num(cf.lam1.at(0, j)) + sep +
             JsonWriter::num(cf.lam2.at(0, j)) + sep +
             JsonWriter::num(cf.has_beta ? cf.beta1.at(0, j) : 0.0) + sep +
             JsonWriter::num(cf.has_beta ? cf.beta2.at(0, j) : 0.0) + sep +
             JsonWriter::num(cf.lam1.at(0, j) - cf.lam2.at(0, j)) + "\n";
    }
    write_text_file(dir + "/curvature_profile.csv", csv);
  }

  // Z_1 landscape seen from the argmin base point.
  {
    const std::size_t x = s1.xi * grid.n_th + s1.xj;
    std::string csv = "i,j,z\n";
    for (std::size_t i = 0; i < grid.n_t; ++i)
      for (std::size_t j = 0; j < grid.n_th; ++j)
        csv += std::to_string(i) + sep + std::to_string(j) + sep +
               JsonWriter::num(z_pair(grid, cf, 1.0, x, i * grid.n_th + j)) +
               "\n";
    write_text_file(dir + "/zmin_slice.csv", csv);
  }

  if (fit) {
    std::string csv = "k,sigma\n";
    for (std::size_t k = 0; k < 4; ++k)
      csv += std::to_string(k) + sep +
             JsonWriter::num(fit->singular_values[k]) + "\n";
    write_text_file(dir + "/singular_values.csv", csv);
  }

  if (phi && phi->s.size() > 1) {
    const std::size_t m = phi->s.size();
    const std::size_t stride = std::max<std::size_t>(1, m / 256);
    std::string csv = "s,phi\n";
    for (std::size_t k = 0; k < m; k += stride)
      csv += JsonWriter::num(phi->s[k]) + sep + JsonWriter::num(phi->phi[k]) +
             "\n";
    if ((m - 1) % stride != 0)
      csv += JsonWriter::num(phi->s[m - 1]) + sep +
             JsonWriter::num(phi->phi[m - 1]) + "\n";
    write_text_file(dir + "/phi.csv", csv);
  }
}

int cmd_verify(const VerifyArgs& va) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto ms_since = [](clock::time_point t) {
    return std::chrono::duration<double, std::milli>(clock::now() - t).count();
  };

  VerificationReport rep;
  rep.zero_timings = va.zero_timings;

  auto t_stage = clock::now();
  TorusGrid grid = load_grid(va.grid_path);
  PsiSpec spec = va.pf.make();
  std::vector<double> alphas = parse_list(va.alpha_list, "--alpha-list");
  rep.psi = spec;
  rep.n_t = grid.n_t;
  rep.n_th = grid.n_th;
  rep.provenance = grid.provenance;
  rep.grid_metadata = grid.metadata;
  rep.timings_ms.emplace_back("load", ms_since(t_stage));

  t_stage = clock::now();
  CurvatureField cf = analyze(grid, DiffScheme::Spectral, &spec);
  const std::size_t n = std::min(grid.n_t, grid.n_th);
  UmbilicDiagnostics ud = umbilic_diagnostics(cf);
  const bool umb_pass = ud.min_spread > kMinSpreadFloor && cf.frames_ok;
  rep.checks.push_back({"umbilic", umb_pass, umbilic_json(ud, cf.frames_ok)});
  rep.timings_ms.emplace_back("analyze", ms_since(t_stage));

  t_stage = clock::now();
  add_residual(rep, weingarten_residual(cf, spec), n);
  add_residual(rep, gradient_constraint_residual(cf), n);
  {
    auto [s1, s2] = simons_residual(cf, spec);
    add_residual(rep, s1, n);
    add_residual(rep, s2, n);
  }
  for (double alpha : alphas) {
    BarrierScan bs = barrier_scan(cf, spec, alpha);
    rep.checks.push_back({bs.lhs.name, bs.lhs.pass, barrier_json(bs, n)});
  }
  try {
    ConformalData cd = conformal_data(grid, cf);
    for (const ResidualSummary& r : conformal_residuals(cd, cf, spec))
      add_residual(rep, r, n);
  } catch (const Error& e) {
    rep.checks.push_back({"conformal", false, failed_stage_json(e)});
  }
  rep.timings_ms.emplace_back("identities", ms_since(t_stage));

  t_stage = clock::now();
  TwoPointScan s1 = scan_Z(grid, cf, 1.0, va.coarse);
  try {
    s1.kappa_star = kappa_star(grid, cf, kKappaPairTol);
  } catch (const Error& e) {
    rep.checks.push_back({"kappa_star", false, failed_stage_json(e)});
  }
  rep.checks.push_back(
      {"two_point_scan", s1.min_value >= -kScanTol, scan_json(s1)});
  if (s1.kappa_star)
    rep.checks.push_back({"kappa_star", *s1.kappa_star <= kKappaThreshold,
                          kappa_json(*s1.kappa_star,
                                     *s1.kappa_star <= kKappaThreshold)});
  try {
    ReflectionCheck rc = reflection_check(grid, cf, s1);
    const bool rpass = rc.residual_normal < kReflectionTol;
    rep.checks.push_back(
        {"reflection", rpass, reflection_json(rc, kReflectionTol, rpass)});
  } catch (const Error& e) {
    rep.checks.push_back({"reflection", false, failed_stage_json(e)});
  }
  {
    ResidualSummary ir = inscribed_radius_summary(s1, grid.n_th);
    add_residual(rep, ir, n);
  }
  rep.timings_ms.emplace_back("two_point", ms_since(t_stage));

  t_stage = clock::now();
  SymmetryFit fit;
  PhiTable phi;
  bool have_fit = false;
  try {
    ResidualSummary cl = curvature_line_constancy(cf);
    add_residual(rep, cl, n);

    double s_min = cf.lam1.at(0, 0) - cf.lam2.at(0, 0);
    double s_max = s_min;
    for (std::size_t i = 0; i < cf.n_t; ++i)
      for (std::size_t j = 0; j < cf.n_th; ++j) {
        const double s = cf.lam1.at(i, j) - cf.lam2.at(i, j);
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
      }
    phi = solve_phi(spec, s_min * (1.0 - 1e-6), s_max * (1.0 + 1e-6),
                    0.5 * (s_min + s_max));
    std::vector<Vec4> V = build_killing(cf, phi);
    fit = fit_Q(grid, V, &cf);
    auto [lg, lh] = lie_derivative_residuals(cf, V);
    fit.lie_g_residual = lg;
    fit.lie_h_residual = lh;
    fit.d1_lambda_residual = cl.max_abs;
    const std::size_t stride = std::max<std::size_t>(1, phi.s.size() / 32);
    for (std::size_t k = 0; k < phi.s.size(); k += stride) {
      fit.phi_s.push_back(phi.s[k]);
      fit.phi_vals.push_back(phi.phi[k]);
    }
    have_fit = true;

    const double rf = (128.0 / static_cast<double>(n)) *
                      (128.0 / static_cast<double>(n));
    const double scale = curvature_scale(cf);
    const double lie_tol = kLieBase * scale * scale * scale * rf;
    const bool pass = fit.rank2 && fit.fit_residual <= kQFitBase * rf &&
                      fit.tangency_nu <= kTangencyTol &&
                      fit.tangency_F <= kTangencyTol && lg <= lie_tol &&
                      lh <= lie_tol;
    rep.checks.push_back({"symmetry", pass, symmetry_json(fit)});
  } catch (const Error& e) {
    rep.checks.push_back({"symmetry", false, failed_stage_json(e)});
  }
  rep.timings_ms.emplace_back("symmetry", ms_since(t_stage));

  if (!va.plots_dir.empty())
    emit_plots(va.plots_dir, grid, cf, s1, have_fit ? &fit : nullptr,
               have_fit ? &phi : nullptr);

  rep.timings_ms.emplace_back("total", ms_since(t_start));

  if (!va.report_path.empty())
    write_text_file(va.report_path, report_json(rep));

  for (const CheckEntry& ce : rep.checks)
    std::printf("%-28s %s\n", ce.name.c_str(), ce.pass ? "PASS" : "FAIL");
  const bool all = rep.overall_pass();
  std::printf("overall                      %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}

// --------------------------------------------------------------------- scan

struct ScanArgs {
  std::string a_list = "1";
  std::string b_list = "0";
  std::string c_list = "0";
  double smax = 20.0;
  std::size_t n = 2000;
  std::string out;
};

int cmd_scan(const ScanArgs& sa) {
  std::vector<double> as = parse_list(sa.a_list, "--a-list");
  std::vector<double> bs = parse_list(sa.b_list, "--b-list");
  std::vector<double> cs = parse_list(sa.c_list, "--c-list");

  std::string csv =
      "a,b,c,structure_pass,margin_a,margin_b,margin_c,margin_d,status,"
      "r,lambda1,lambda2,spread\n";
  for (double a : as)
    for (double b : bs)
      for (double c : cs) {
        std::string row = JsonWriter::num(a) + "," + JsonWriter::num(b) + "," +
                          JsonWriter::num(c) + ",";
        try {
          PsiSpec spec = PsiSpec::sqrt_family(a, b, c);
          StructureReport sr = check_structure(spec, sa.smax, sa.n);
          row += std::string(sr.pass ? "1" : "0") + "," +
                 JsonWriter::num(sr.margin_a) + "," +
                 JsonWriter::num(sr.margin_b) + "," +
                 JsonWriter::num(sr.margin_c) + "," +
                 JsonWriter::num(sr.margin_d) + ",";
          try {
            ProductTorus pt = product_torus(spec);
            row += "ok," + JsonWriter::num(pt.r) + "," +
                   JsonWriter::num(pt.lambda1) + "," +
                   JsonWriter::num(pt.lambda2) + "," +
                   JsonWriter::num(pt.lambda1 - pt.lambda2);
          } catch (const Error& e) {
            row += std::string(error_code_name(e.code())) + ",,,,";
          }
        } catch (const Error& e) {
          row += "0,,,,," + std::string(error_code_name(e.code())) + ",,,,";
        }
        csv += row + "\n";
      }

  if (sa.out.empty())
    std::printf("%s", csv.c_str());
  else
    write_text_file(sa.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weingarten torus construction and verification"};
  app.require_subcommand(1);

  PsiFlags psi_pf;
  double psi_smax = 20.0;
  std::size_t psi_n = 10000;
  CLI::App* c_psi = app.add_subcommand(
      "psi-check", "check the admissibility conditions of a curvature relation");
  psi_pf.attach(c_psi);
  c_psi->add_option("--smax", psi_smax, "upper end of the scanned s range");
  c_psi->add_option("--n", psi_n, "number of samples");

  ConstructArgs ca;
  CLI::App* c_con =
      app.add_subcommand("construct", "build a torus grid and save it as JSON");
  c_con->add_option("kind", ca.kind, "product or profile")
      ->required()
      ->check(CLI::IsMember({"product", "profile"}));
  ca.pf.attach(c_con);
  c_con->add_option("--mode", ca.mode, "resolution preset: quick 64, full 128")
      ->check(CLI::IsMember({"quick", "full"}));
  c_con->add_option("--nt", ca.nt, "orbit direction samples (overrides --mode)");
  c_con->add_option("--nth", ca.nth,
                    "profile direction samples (overrides --mode)");
  c_con->add_option("--p", ca.p, "closure winding count in v");
  c_con->add_option("--q", ca.q, "half oscillations per closure");
  c_con->add_option("--bracket", ca.bracket,
                    "lo,hi bracket for the starting turning point");
  c_con->add_option("--out", ca.out, "output grid path")->required();
  c_con->add_option("--profile-out", ca.profile_out,
                    "also save the profile curve as CSV");

  VerifyArgs va;
  CLI::App* c_ver =
      app.add_subcommand("verify", "run every check on a grid and report");
  c_ver->add_option("--grid", va.grid_path, "grid JSON path")->required();
  va.pf.attach(c_ver);
  c_ver->add_option("--alpha-list", va.alpha_list,
                    "barrier exponents, comma separated");
  c_ver->add_option("--two-point-coarse", va.coarse,
                    "coarse factor of the pair scan");
  c_ver->add_option("--report", va.report_path, "write the report JSON here");
  c_ver->add_option("--plots", va.plots_dir, "write plot data CSVs here");
  c_ver->add_flag("--zero-timings", va.zero_timings,
                  "report timings as 0 for byte-identical outputs");

  ScanArgs sa;
  CLI::App* c_scan = app.add_subcommand(
      "scan", "sweep sqrt-family parameters and summarize as CSV");
  c_scan->add_option("--a-list", sa.a_list, "values of a, comma separated");
  c_scan->add_option("--b-list", sa.b_list, "values of b, comma separated");
  c_scan->add_option("--c-list", sa.c_list, "values of c, comma separated");
  c_scan->add_option("--smax", sa.smax, "structure scan range");
  c_scan->add_option("--n", sa.n, "structure scan samples");
  c_scan->add_option("--out", sa.out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const bool constructing = app.got_subcommand(c_con);
  try {
    if (app.got_subcommand(c_psi)) return cmd_psi_check(psi_pf, psi_smax, psi_n);
    if (constructing) return cmd_construct(ca);
    if (app.got_subcommand(c_ver)) return cmd_verify(va);
    return cmd_scan(sa);
  } catch (const Error& e) {
    const int code = exit_code_for(e, constructing);
    if (code == 3)
      std::printf("%s\n", error_json(e).c_str());
    else
      std::fprintf(stderr, "%s\n", e.what());
    return code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
