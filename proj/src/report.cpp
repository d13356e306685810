#include "wlab/report.hpp"

#include <fstream>

#include "wlab/errors.hpp"
#include "wlab/jsonw.hpp"

namespace wlab {

bool VerificationReport::overall_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string residual_json(const ResidualSummary& r, std::size_t resolution) {
  JsonWriter w;
  w.begin_obj();
  w.kv("name", r.name);
  w.kv("max_abs", r.max_abs);
  w.kv("mean_abs", r.mean_abs);
  w.key("arg");
  w.begin_arr();
  w.value_int(static_cast<long long>(r.arg_i));
  w.value_int(static_cast<long long>(r.arg_j));
  w.end_arr();
  w.kv("tolerance", r.tolerance);
  w.kv("resolution", resolution);
  if (!r.refine.empty()) {
    w.key("refine");
    w.begin_arr();
    for (const auto& [n, v] : r.refine) {
      w.begin_arr();
      w.value_int(static_cast<long long>(n));
      w.value_num(v);
      w.end_arr();
    }
    w.end_arr();
  }
  w.kv("pass", r.pass);
  w.end_obj();
  return w.str();
}

std::string scan_json(const TwoPointScan& s) {
  JsonWriter w;
  w.begin_obj();
  w.kv("alpha", s.alpha);
  w.kv("min", s.min_value);
  w.key("argmin");
  w.begin_arr();
  w.begin_arr();
  w.value_int(static_cast<long long>(s.xi));
  w.value_int(static_cast<long long>(s.xj));
  w.end_arr();
  w.begin_arr();
  w.value_int(static_cast<long long>(s.yi));
  w.value_int(static_cast<long long>(s.yj));
  w.end_arr();
  w.end_arr();
  if (s.kappa_star) w.kv("kappa_star", *s.kappa_star);
  if (s.polished_min) w.kv("polished_min", *s.polished_min);
  w.kv("coarse_factor", s.coarse_factor);
  w.kv("refine_cells", s.refine_cells);
  w.kv("evaluations", s.evaluations);
  w.kv("used_brute", s.used_brute);
  w.kv("diag_excluded", s.diag_excluded);
  w.end_obj();
  return w.str();
}

std::string reflection_json(const ReflectionCheck& rc, double tolerance,
                            bool pass) {
  JsonWriter w;
  w.begin_obj();
  w.kv("name", std::string("reflection"));
  w.key("pair");
  w.begin_arr();
  w.begin_arr();
  w.value_int(static_cast<long long>(rc.xi));
  w.value_int(static_cast<long long>(rc.xj));
  w.end_arr();
  w.begin_arr();
  w.value_int(static_cast<long long>(rc.yi));
  w.value_int(static_cast<long long>(rc.yj));
  w.end_arr();
  w.end_arr();
  w.key("axis");
  w.begin_arr();
  for (double a : rc.axis) w.value_num(a);
  w.end_arr();
  w.kv("residual_position", rc.residual_position);
  w.kv("residual_normal", rc.residual_normal);
  w.kv("valid", rc.valid);
  w.kv("tolerance", tolerance);
  w.kv("pass", pass);
  w.end_obj();
  return w.str();
}

std::string symmetry_json(const SymmetryFit& f) {
  JsonWriter w;
  w.begin_obj();
  w.key("Q");
  w.begin_arr();
  for (int i = 0; i < 4; ++i) {
    w.begin_arr();
    for (int j = 0; j < 4; ++j) w.value_num(f.Q[i][j]);
    w.end_arr();
  }
  w.end_arr();
  w.key("singular_values");
  w.begin_arr();
  for (double s : f.singular_values) w.value_num(s);
  w.end_arr();
  w.kv("rank2", f.rank2);
  w.kv("fit_residual", f.fit_residual);
  w.kv("lie_g", f.lie_g_residual);
  w.kv("lie_h", f.lie_h_residual);
  w.kv("d1_lambda", f.d1_lambda_residual);
  w.kv("condition", f.condition);
  w.kv("tangency_nu", f.tangency_nu);
  w.kv("tangency_F", f.tangency_F);
  if (!f.phi_s.empty()) {
    w.key("phi_samples");
    w.begin_arr();
    for (std::size_t k = 0; k < f.phi_s.size(); ++k) {
      w.begin_arr();
      w.value_num(f.phi_s[k]);
      w.value_num(f.phi_vals[k]);
      w.end_arr();
    }
    w.end_arr();
  }
  w.end_obj();
  return w.str();
}

std::string structure_json(const StructureReport& r) {
  JsonWriter w;
  w.begin_obj();
  w.kv("pass", r.pass);
  w.key("margins");
  w.begin_obj();
  w.kv("slope_bound", r.margin_a);
  w.kv("slope_sign", r.margin_b);
  w.kv("convexity_sign", r.margin_c);
  w.kv("convexity_bound", r.margin_d);
  w.end_obj();
  w.key("worst_s");
  w.begin_obj();
  w.kv("slope_bound", r.worst_s_a);
  w.kv("slope_sign", r.worst_s_b);
  w.kv("convexity_sign", r.worst_s_c);
  w.kv("convexity_bound", r.worst_s_d);
  w.end_obj();
  w.kv("s_max", r.s_max);
  w.kv("n_samples", r.n_samples);
  w.end_obj();
  return w.str();
}

std::string psi_json(const PsiSpec& spec) {
  JsonWriter w;
  w.begin_obj();
  if (spec.kind == PsiSpec::Kind::SqrtFamily) {
    w.kv("kind", std::string("sqrt_family"));
    w.kv("a", spec.a);
    w.kv("b", spec.b);
    w.kv("c", spec.c);
  } else {
    w.kv("kind", std::string("tabulated"));
    w.kv("table_path", spec.table_path);
    w.kv("n_nodes", spec.ts.size());
    w.kv("s_min", spec.ts.empty() ? 0.0 : spec.ts.front());
    w.kv("s_max", spec.ts.empty() ? 0.0 : spec.ts.back());
  }
  w.end_obj();
  return w.str();
}

std::string report_json(const VerificationReport& rep) {
  JsonWriter w;
  w.begin_obj();
  w.kv("tool_version", rep.tool_version);
  w.kv("schema_version", rep.schema_version);
  w.key("psi");
  w.value_raw(psi_json(rep.psi));
  w.key("grid");
  w.begin_obj();
  w.kv("n_t", rep.n_t);
  w.kv("n_th", rep.n_th);
  w.kv("provenance", rep.provenance);
  if (!rep.grid_metadata.empty()) {
    w.key("metadata");
    w.begin_obj();
    for (const auto& [k, raw] : rep.grid_metadata) {
      w.key(k);
      w.value_raw(raw);
    }
    w.end_obj();
  }
  w.end_obj();
  w.key("checks");
  w.begin_arr();
  for (const auto& c : rep.checks) {
    w.begin_obj();
    w.kv("name", c.name);
    w.kv("pass", c.pass);
    w.key("data");
    w.value_raw(c.json);
    w.end_obj();
  }
  w.end_arr();
  w.kv("overall_pass", rep.overall_pass());
  w.key("timings_ms");
  w.begin_obj();
  for (const auto& [k, v] : rep.timings_ms)
    w.kv(k, rep.zero_timings ? 0.0 : v);
  w.end_obj();
  w.end_obj();
  return w.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::BadInput, "cannot open for writing: " + path);
  out << text;
  if (!out) raise(ErrorCode::BadInput, "write failed: " + path);
}

}  // namespace wlab
