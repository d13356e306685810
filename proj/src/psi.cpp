#include "wlab/psi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

bool finite(double x) { return std::isfinite(x); }

// Index of the table interval containing s (ts[i] <= s <= ts[i+1]).
std::size_t locate(const std::vector<double>& ts, double s) {
  auto it = std::upper_bound(ts.begin(), ts.end(), s);
  std::size_t i = static_cast<std::size_t>(it - ts.begin());
  if (i == 0) return 0;
  if (i >= ts.size()) return ts.size() - 2;
  return i - 1;
}

// Cubic Hermite on one interval given endpoint values and derivatives.
struct Hermite {
  double value, deriv;
};

Hermite hermite_eval(double s0, double s1, double f0, double f1, double d0,
                     double d1, double s) {
  const double h = s1 - s0;
  const double t = (s - s0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double v = h00 * f0 + h * h10 * d0 + h01 * f1 + h * h11 * d1;
  const double dh00 = (6 * t2 - 6 * t) / h;
  const double dh10 = (3 * t2 - 4 * t + 1);
  const double dh01 = (-6 * t2 + 6 * t) / h;
  const double dh11 = (3 * t2 - 2 * t);
  const double dv = dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1;
  return {v, dv};
}

void validate_table(const PsiSpec& sp) {
  const auto& s = sp.ts;
  if (s.size() < 4) raise(ErrorCode::InvalidSpec, "table needs at least 4 rows");
  if (sp.tpsi.size() != s.size() || sp.tdpsi.size() != s.size() ||
      sp.tddpsi.size() != s.size())
    raise(ErrorCode::InvalidSpec, "table column lengths differ");
  if (s.front() < 0.0) raise(ErrorCode::InvalidSpec, "table s must be >= 0");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!finite(s[i]) || !finite(sp.tpsi[i]) || !finite(sp.tdpsi[i]) ||
        !finite(sp.tddpsi[i]))
      raise(ErrorCode::InvalidSpec, "non-finite table entry");
    if (i > 0 && s[i] <= s[i - 1])
      raise(ErrorCode::InvalidSpec, "table s must be strictly increasing");
  }
  if (s.front() == 0.0 && std::abs(sp.tdpsi.front()) > 1e-10)
    raise(ErrorCode::InvalidSpec, "even relation requires psi'(0) = 0");
  // Derivative columns must be consistent with divided differences of the
  // previous column; this catches swapped or mismatched columns, not
  // discretization error of a coarse but honest table.
  double scale_d = 1e-12, scale_dd = 1e-12;
  for (std::size_t i = 0; i < s.size(); ++i) {
    scale_d = std::max(scale_d, std::abs(sp.tdpsi[i]));
    scale_dd = std::max(scale_dd, std::abs(sp.tddpsi[i]));
  }
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h = s[i + 1] - s[i - 1];
    const double fd1 = (sp.tpsi[i + 1] - sp.tpsi[i - 1]) / h;
    const double fd2 = (sp.tdpsi[i + 1] - sp.tdpsi[i - 1]) / h;
    const double tol1 = 0.05 * scale_d + 2.0 * h * h * scale_dd;
    if (std::abs(fd1 - sp.tdpsi[i]) > tol1)
      raise(ErrorCode::InvalidSpec, "dpsi column inconsistent with psi column");
    const double tol2 = 0.05 * scale_dd + 0.05 + 2.0 * h * h * scale_dd;
    if (std::abs(fd2 - sp.tddpsi[i]) > tol2)
      raise(ErrorCode::InvalidSpec, "ddpsi column inconsistent with dpsi column");
  }
}

}  // namespace

PsiSpec PsiSpec::sqrt_family(double a, double b, double c) {
  if (!finite(a) || !finite(b) || !finite(c))
    raise(ErrorCode::InvalidSpec, "non-finite family parameter");
  if (a <= 0.0) raise(ErrorCode::InvalidSpec, "sqrt family needs a > 0");
  if (b < 0.0) raise(ErrorCode::InvalidSpec, "sqrt family needs b >= 0");
  if (c < 0.0) raise(ErrorCode::InvalidSpec, "sqrt family needs c >= 0");
  PsiSpec sp;
  sp.kind = Kind::SqrtFamily;
  sp.a = a;
  sp.b = b;
  sp.c = c;
  return sp;
}

PsiSpec PsiSpec::tabulated(std::vector<double> s, std::vector<double> psi,
                           std::vector<double> dpsi, std::vector<double> ddpsi) {
  PsiSpec sp;
  sp.kind = Kind::Tabulated;
  sp.ts = std::move(s);
  sp.tpsi = std::move(psi);
  sp.tdpsi = std::move(dpsi);
  sp.tddpsi = std::move(ddpsi);
  validate_table(sp);
  return sp;
}

PsiSpec PsiSpec::tabulated_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::BadInput, "cannot open table " + path);
  std::vector<double> s, p, dp, ddp;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find_first_not_of("0123456789+-.eE, \t\r") != std::string::npos)
      continue;  // header row
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double v[4];
    for (int k = 0; k < 4; ++k)
      if (!(ss >> v[k])) raise(ErrorCode::BadInput, "bad table row in " + path);
    s.push_back(v[0]);
    p.push_back(v[1]);
    dp.push_back(v[2]);
    ddp.push_back(v[3]);
  }
  PsiSpec sp = tabulated(std::move(s), std::move(p), std::move(dp), std::move(ddp));
  sp.table_path = path;
  return sp;
}

double PsiSpec::s_min() const {
  return kind == Kind::Tabulated ? ts.front() : 0.0;
}

double PsiSpec::s_max() const {
  return kind == Kind::Tabulated ? ts.back()
                                 : std::numeric_limits<double>::infinity();
}

PsiEval eval_psi(const PsiSpec& spec, double s) {
  if (!finite(s) || s < 0.0) raise(ErrorCode::OutOfRange, "psi evaluated at s < 0");
  PsiEval e;
  if (spec.kind == PsiSpec::Kind::SqrtFamily) {
    const double r2 = spec.a + spec.b * s * s;
    const double r = std::sqrt(r2);
    e.psi = r + spec.c;
    e.dpsi = spec.b * s / r;
    e.ddpsi = spec.a * spec.b / (r2 * r);
    e.chi = spec.b / r;
    return e;
  }
  if (s < spec.ts.front() || s > spec.ts.back())
    raise(ErrorCode::OutOfRange, "s outside tabulated range");
  const std::size_t i = locate(spec.ts, s);
  const double s0 = spec.ts[i], s1 = spec.ts[i + 1];
  // psi from the (psi, dpsi) Hermite; psi', psi'' from the (dpsi, ddpsi)
  // Hermite so the second derivative stays smooth.
  e.psi = hermite_eval(s0, s1, spec.tpsi[i], spec.tpsi[i + 1], spec.tdpsi[i],
                       spec.tdpsi[i + 1], s)
              .value;
  Hermite d = hermite_eval(s0, s1, spec.tdpsi[i], spec.tdpsi[i + 1],
                           spec.tddpsi[i], spec.tddpsi[i + 1], s);
  e.dpsi = d.value;
  e.ddpsi = d.deriv;
  // chi = psi'(s)/s amplifies noise near zero; switch to the limit psi''(0)
  // once the direct quotient loses accuracy.
  const double s_scale = std::max(1.0, spec.ts.back());
  if (s >= 1e-4 * s_scale || spec.ts.front() > 0.0)
    e.chi = e.dpsi / s;
  else
    e.chi = spec.tddpsi.front();
  return e;
}

StructureReport check_structure(const PsiSpec& spec, double s_max,
                                std::size_t n) {
  if (!finite(s_max) || s_max <= 0.0)
    raise(ErrorCode::InvalidSpec, "structure check needs s_max > 0");
  if (n < 16) raise(ErrorCode::InvalidSpec, "structure check needs n >= 16");
  if (spec.kind == PsiSpec::Kind::Tabulated && s_max > spec.ts.back())
    raise(ErrorCode::OutOfRange, "s_max beyond tabulated range");

  std::vector<double> grid;
  grid.reserve(n + 64);
  const double h = s_max / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) grid.push_back(h * static_cast<double>(i));
  // Geometric tail toward zero; conditions degenerate there, and the strict
  // one is weakest at small s when psi(0) > 0 fails to dominate.
  const double s_lo_limit = std::max(1e-8 * s_max, spec.s_min());
  for (double s = h / std::sqrt(2.0); s > s_lo_limit; s /= std::sqrt(2.0))
    grid.push_back(s);

  StructureReport rep;
  rep.s_max = s_max;
  rep.n_samples = grid.size();
  double ma = std::numeric_limits<double>::infinity(), mb = ma, mc = ma, md = ma;
  for (double s : grid) {
    const PsiEval e = eval_psi(spec, s);
    const double sp = s * e.dpsi;
    const double spp = s * e.ddpsi;
    const double ca = std::min(e.psi, s) - sp;
    const double cb = sp;
    const double cc = spp;
    const double cd = (1.0 - e.dpsi * e.dpsi) - spp;
    if (ca < ma) { ma = ca; rep.worst_s_a = s; }
    if (cb < mb) { mb = cb; rep.worst_s_b = s; }
    if (cc < mc) { mc = cc; rep.worst_s_c = s; }
    if (cd < md) { md = cd; rep.worst_s_d = s; }
  }
  rep.margin_a = ma;
  rep.margin_b = mb;
  rep.margin_c = mc;
  rep.margin_d = md;
  const double eps = 1e-12;
  rep.pass = (ma > 0.0) && (mb >= -eps) && (mc >= -eps) && (md >= -eps);
  return rep;
}

BetaPair beta_coeffs(const PsiSpec& spec, double s) {
  const PsiEval e = eval_psi(spec, s);
  if (e.dpsi >= 1.0)
    raise(ErrorCode::StructureViolation,
          "psi'(s) >= 1 at s = " + std::to_string(s));
  return {1.0 - e.dpsi, 1.0 + e.dpsi};
}

}  // namespace wlab
