#include "wlab/rotational.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>

#include "wlab/errors.hpp"
#include "wlab/jsonw.hpp"
#include "wlab/spectral.hpp"

namespace wlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBandLo = 1e-4;  // admissible u band is (kBandLo, pi/2 - kBandLo)

double psi_at(const PsiSpec& spec, double s) { return eval_psi(spec, s).psi; }

}  // namespace

ProductTorus product_torus(const PsiSpec& spec, double tol) {
  // f(r) = (1 - 2 r^2)/(r p) - psi(1/(r p)) with p = sqrt(1 - r^2); the spread
  // s = 1/(r p) decreases from +inf to 2 as r goes from 0 to 1/sqrt(2).
  auto f = [&spec](double r) {
    const double p = std::sqrt(1.0 - r * r);
    const double s = 1.0 / (r * p);
    return (1.0 - 2.0 * r * r) / (r * p) - psi_at(spec, s);
  };
  double r_lo = 1e-6;
  const double smax = spec.s_max();
  if (std::isfinite(smax)) {
    if (smax < 2.0)
      raise(ErrorCode::OutOfRange, "tabulated relation does not reach spread 2");
    // r p = 1/smax keeps the spread inside the table.
    const double rp = 1.0 / smax;
    r_lo = std::max(r_lo, std::sqrt(0.5 * (1.0 - std::sqrt(1.0 - 4.0 * rp * rp))));
  }
  double r_hi = 1.0 / std::sqrt(2.0) - 1e-12;
  double f_lo = f(r_lo), f_hi = f(r_hi);
  if (!(f_lo > 0.0 && f_hi < 0.0))
    raise(ErrorCode::NoRoot,
          "no product torus: defect signs at bracket ends are " +
              std::to_string(f_lo) + " and " + std::to_string(f_hi));
  for (int it = 0; it < 200 && (r_hi - r_lo) > tol; ++it) {
    const double mid = 0.5 * (r_lo + r_hi);
    if (f(mid) > 0.0)
      r_lo = mid;
    else
      r_hi = mid;
  }
  ProductTorus pt;
  pt.r = 0.5 * (r_lo + r_hi);
  const double p = std::sqrt(1.0 - pt.r * pt.r);
  pt.lambda1 = p / pt.r;
  pt.lambda2 = -pt.r / p;
  return pt;
}

TorusGrid make_product_grid(double r, std::size_t n_t, std::size_t n_th) {
  if (!(r > 0.0 && r < 1.0)) raise(ErrorCode::BadInput, "orbit radius must be in (0,1)");
  if (n_t < 4 || n_th < 4)
    raise(ErrorCode::BadInput, "grid needs at least 4 samples per axis");
  const double p = std::sqrt(1.0 - r * r);
  TorusGrid g;
  g.n_t = n_t;
  g.n_th = n_th;
  g.provenance = "product";
  g.set_meta("r", r);
  g.points.resize(n_t * n_th);
  for (std::size_t i = 0; i < n_t; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_t);
    for (std::size_t j = 0; j < n_th; ++j) {
      const double th = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_th);
      g.at(i, j) = Vec4{{r * std::cos(t), r * std::sin(t), p * std::cos(th),
                         p * std::sin(th)}};
    }
  }
  return g;
}

double solve_vertical_curvature(const PsiSpec& spec, double lambda_orbit,
                                double tol) {
  const double lo = lambda_orbit;
  auto defect = [&](double x) { return x + lo - psi_at(spec, std::abs(x - lo)); };
  // The defect is strictly increasing (slope 1 -+ psi' in (0, 2)); expand a
  // bracket around lambda_orbit until the signs differ.
  const double smax = spec.s_max();
  const double reach_cap = std::isfinite(smax) ? smax : 1e12;
  double g = std::max(1.0, psi_at(spec, 0.0));
  double x_lo = lo - g, x_hi = lo + g;
  for (int it = 0;; ++it) {
    const bool neg_ok = defect(x_lo) < 0.0;
    const bool pos_ok = defect(x_hi) > 0.0;
    if (neg_ok && pos_ok) break;
    g *= 2.0;
    if (g > reach_cap)
      raise(ErrorCode::NoRoot,
            "no vertical curvature balances the relation at orbit curvature " +
                std::to_string(lo));
    if (!neg_ok) x_lo = lo - g;
    if (!pos_ok) x_hi = lo + g;
    if (it > 80) raise(ErrorCode::ConvergenceFailure, "bracket expansion stalled");
  }
  // Safeguarded Newton.
  double x = 0.5 * (x_lo + x_hi);
  for (int it = 0; it < 100; ++it) {
    const double s = std::abs(x - lo);
    const PsiEval e = eval_psi(spec, s);
    const double d = x + lo - e.psi;
    const double sgn = x >= lo ? 1.0 : -1.0;
    const double dd = 1.0 - sgn * e.dpsi;
    if (d > 0.0)
      x_hi = x;
    else
      x_lo = x;
    double x_new = dd > 1e-14 ? x - d / dd : 0.5 * (x_lo + x_hi);
    if (!(x_new > x_lo && x_new < x_hi)) x_new = 0.5 * (x_lo + x_hi);
    const double moved = std::abs(x_new - x);
    x = x_new;
    if (moved < tol && std::abs(defect(x)) < 1e-12 * (1.0 + std::abs(x))) return x;
  }
  if (x_hi - x_lo < 1e-10) return 0.5 * (x_lo + x_hi);
  raise(ErrorCode::ConvergenceFailure, "vertical curvature solve did not converge");
}

double equilibrium_u(const PsiSpec& spec) {
  auto G = [&](double u) {
    return solve_vertical_curvature(spec, std::tan(u)) + 1.0 / std::tan(u);
  };
  double a = 0.05, b = kPi / 2.0 - 0.05;
  double fa = G(a), fb = G(b);
  if (!(fa > 0.0 && fb < 0.0))
    raise(ErrorCode::NoRoot, "no constant-profile equilibrium in the band");
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    (G(m) > 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double limit_dv(const PsiSpec& spec) {
  const double us = equilibrium_u(spec);
  const double t = std::tan(us);
  const double sstar = t + 1.0 / t;
  const BetaPair bp = beta_coeffs(spec, sstar);
  return kPi / std::sqrt(1.0 + (bp.b1 / bp.b2) * t * t);
}

namespace {

struct Deriv {
  double du, dv, dom;
};

Deriv rhs(const PsiSpec& spec, const ProfileState& y) {
  if (!(y.u > kBandLo && y.u < kPi / 2.0 - kBandLo))
    raise(ErrorCode::BandExit,
          "profile left the admissible band at u = " + std::to_string(y.u));
  const double m = std::sin(y.u), w = std::cos(y.u);
  const double so = std::sin(y.om);
  const double lam_o = (m / w) * so;
  const double lam_p = solve_vertical_curvature(spec, lam_o);
  Deriv d;
  d.du = std::cos(y.om);
  d.dv = so / m;
  d.dom = -lam_p - (w / m) * so;
  return d;
}

ProfileState implicit_midpoint(const PsiSpec& spec, const ProfileState& y0, double h) {
  Deriv d = rhs(spec, y0);
  ProfileState ym{y0.u + 0.5 * h * d.du, y0.v + 0.5 * h * d.dv,
                  y0.om + 0.5 * h * d.dom};
  double prev = std::numeric_limits<double>::max();
  for (int it = 0; it < 60; ++it) {
    d = rhs(spec, ym);
    const ProfileState yn{y0.u + 0.5 * h * d.du, y0.v + 0.5 * h * d.dv,
                          y0.om + 0.5 * h * d.dom};
    const double delta = std::abs(yn.u - ym.u) + std::abs(yn.v - ym.v) +
                         std::abs(yn.om - ym.om);
    ym = yn;
    const double scale =
        1.0 + std::abs(ym.u) + std::abs(ym.v) + std::abs(ym.om);
    if (delta < 4e-16 * scale) break;
    // Once the update stops shrinking the iterate is at round-off level.
    if (delta >= prev && delta < 1e-11 * scale) break;
    if (it == 59) raise(ErrorCode::StepFailure, "midpoint iteration stalled");
    prev = delta;
  }
  return ProfileState{2.0 * ym.u - y0.u, 2.0 * ym.v - y0.v, 2.0 * ym.om - y0.om};
}

// Order-4 symmetric composition (triple jump) of the midpoint rule.
ProfileState step4(const PsiSpec& spec, const ProfileState& y, double h) {
  const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double g2 = 1.0 - 2.0 * g1;
  ProfileState s1 = implicit_midpoint(spec, y, g1 * h);
  ProfileState s2 = implicit_midpoint(spec, s1, g2 * h);
  return implicit_midpoint(spec, s2, g1 * h);
}

struct TurningEvent {
  ProfileState state;
  double s_elapsed = 0.0;
};

// Advances from a turning point (cos om = 0) to the next one.  cos(om)
// crosses zero transversally at turning points, so the event is located by a
// sign change and refined by bisection on the step.
TurningEvent next_turning(const PsiSpec& spec, const ProfileState& start,
                          double step, std::vector<ProfileState>* trace) {
  ProfileState y = start;
  double s = 0.0;
  double ref = 0.0;
  const double s_cap = 1000.0;
  if (trace) trace->push_back(y);
  while (s < s_cap) {
    const ProfileState yn = step4(spec, y, step);
    const double e = std::cos(yn.om);
    if (ref == 0.0) {
      if (e != 0.0) ref = e > 0.0 ? 1.0 : -1.0;
      y = yn;
      s += step;
      if (trace) trace->push_back(y);
      continue;
    }
    if (e == 0.0 || (e > 0.0) != (ref > 0.0)) {
      // Bracketed in (s, s + step]; bisect the substep from y.
      ProfileState ya = y;
      double lo = 0.0, hi = step;
      for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, s); ++it) {
        const double mid = 0.5 * (lo + hi);
        const ProfileState ymid = step4(spec, ya, mid - lo);
        const double em = std::cos(ymid.om);
        if (em == 0.0 || (em > 0.0) != (ref > 0.0)) {
          hi = mid;
        } else {
          ya = ymid;
          lo = mid;
        }
      }
      const ProfileState yev = step4(spec, ya, 0.5 * (hi + lo) - lo);
      TurningEvent ev;
      ev.state = yev;
      ev.s_elapsed = s + 0.5 * (hi + lo);
      if (trace) trace->push_back(yev);
      return ev;
    }
    y = yn;
    s += step;
    if (trace) trace->push_back(y);
  }
  raise(ErrorCode::ConvergenceFailure,
        "no turning point within arc length " + std::to_string(s_cap));
}

}  // namespace

HalfOscillation integrate_profile(const PsiSpec& spec, double u0, double step,
                                  std::vector<ProfileState>* trace) {
  if (!(u0 > kBandLo && u0 < kPi / 2.0 - kBandLo))
    raise(ErrorCode::BandExit, "start value outside the admissible band");
  const ProfileState start{u0, 0.0, kPi / 2.0};
  const TurningEvent ev = next_turning(spec, start, step, trace);
  HalfOscillation h;
  h.s_half = ev.s_elapsed;
  h.dv = ev.state.v;
  h.u_end = ev.state.u;
  return h;
}

double turning_drift(const PsiSpec& spec, double u0, int n_half, double step) {
  ProfileState y{u0, 0.0, kPi / 2.0};
  std::vector<double> turns;
  for (int k = 0; k < n_half; ++k) {
    const TurningEvent ev = next_turning(spec, y, step, nullptr);
    turns.push_back(ev.state.u);
    y = ev.state;
  }
  // Even-indexed turning points should reproduce the first one, odd-indexed
  // ones the start value; the walk is reversible so any drift is integrator
  // error.
  double drift = 0.0;
  for (std::size_t k = 0; k < turns.size(); ++k) {
    const double ref = (k % 2 == 0) ? turns[0] : u0;
    drift = std::max(drift, std::abs(turns[k] - ref));
  }
  return drift;
}

ClosureScan scan_closures(const PsiSpec& spec, double u_lo, double u_hi,
                          std::size_t n_samples, long long q_max, double step) {
  const double us = equilibrium_u(spec);
  if (u_lo <= 0.0) u_lo = std::max(10.0 * kBandLo, 0.02);
  if (u_hi <= 0.0) u_hi = kPi / 2.0 - 0.02;
  if (!(u_lo < us && us < u_hi))
    raise(ErrorCode::BadInput, "scan band must contain the equilibrium");
  ClosureScan sc;
  sc.u_lo = u_lo;
  sc.u_hi = u_hi;
  const double delta = 1e-3;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double u0 = u_lo + (u_hi - u_lo) * static_cast<double>(k) /
                                 static_cast<double>(n_samples - 1);
    if (std::abs(u0 - us) < delta) {
      sc.u0.push_back(us);
      sc.dv.push_back(limit_dv(spec));
      continue;
    }
    double dv = std::numeric_limits<double>::quiet_NaN();
    try {
      dv = integrate_profile(spec, u0, step).dv;
    } catch (const Error&) {
      // Start values whose oscillation leaves the band are skipped.
    }
    sc.u0.push_back(u0);
    sc.dv.push_back(dv);
  }
  for (std::size_t k = 0; k + 1 < sc.u0.size(); ++k) {
    const double d1 = sc.dv[k], d2 = sc.dv[k + 1];
    if (!std::isfinite(d1) || !std::isfinite(d2)) continue;
    for (long long q = 1; q <= q_max; ++q)
      for (long long p = 1; p < 2 * q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        const double target = kPi * static_cast<double>(p) / static_cast<double>(q);
        if ((d1 - target) * (d2 - target) < 0.0)
          sc.candidates.push_back({p, q, sc.u0[k], sc.u0[k + 1]});
      }
  }
  return sc;
}

ProfileCurve close_profile(const PsiSpec& spec, long long p, long long q,
                           double u_lo, double u_hi, double step,
                           std::size_t n_samples) {
  if (p < 1 || q < 1 || std::gcd(p, q) != 1)
    raise(ErrorCode::BadInput, "closure fraction must be coprime positive p/q");
  const double target = kPi * static_cast<double>(p) / static_cast<double>(q);
  auto dv_at = [&](double u0) { return integrate_profile(spec, u0, step).dv; };
  const double fa = dv_at(u_lo) - target;
  const double fb = dv_at(u_hi) - target;
  if (!(fa * fb < 0.0) && fa != 0.0 && fb != 0.0)
    raise(ErrorCode::NotFound,
          "dv does not cross pi p/q on the bracket: ends give " +
              std::to_string(fa + target) + " and " + std::to_string(fb + target));
  double a = u_lo, b = u_hi;
  for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = dv_at(m) - target;
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fm > 0.0) == (fa > 0.0))
      a = m;
    else
      b = m;
  }
  const double u0 = 0.5 * (a + b);

  const HalfOscillation half = integrate_profile(spec, u0, step);
  ProfileCurve pc;
  pc.u0 = u0;
  pc.s_half = half.s_half;
  pc.dv_half = half.dv;
  pc.p = p;
  pc.q = q;
  pc.length = 2.0 * static_cast<double>(q) * half.s_half;
  pc.step = step;

  // Uniform arc-length samples over the closed curve.
  const std::size_t M = n_samples;
  pc.s.resize(M);
  pc.u.resize(M);
  pc.v.resize(M);
  pc.du.resize(M);
  pc.dv.resize(M);
  pc.lam_profile.resize(M);
  pc.lam_orbit.resize(M);
  ProfileState y{u0, 0.0, kPi / 2.0};
  const double hs = pc.length / static_cast<double>(M);
  const int n_sub = std::max(1, static_cast<int>(std::ceil(hs / step)));
  const double h_sub = hs / static_cast<double>(n_sub);
  for (std::size_t k = 0; k < M; ++k) {
    pc.s[k] = hs * static_cast<double>(k);
    pc.u[k] = y.u;
    pc.v[k] = y.v;
    const double m = std::sin(y.u), w = std::cos(y.u);
    const double so = std::sin(y.om);
    pc.du[k] = std::cos(y.om);
    pc.dv[k] = so / m;
    const double lam_o = (m / w) * so;
    pc.lam_orbit[k] = lam_o;
    pc.lam_profile[k] = solve_vertical_curvature(spec, lam_o);
    for (int sub = 0; sub < n_sub; ++sub) y = step4(spec, y, h_sub);
  }
  // The tangent angle om may rotate by a multiple of 2 pi over the closed
  // curve (looping profiles), so it only closes modulo 2 pi.
  pc.closure_residual = std::abs(y.u - u0) +
                        std::abs(y.v - 2.0 * kPi * static_cast<double>(p)) +
                        std::abs(std::remainder(y.om - kPi / 2.0, 2.0 * kPi));
  if (pc.closure_residual > 1e-6)
    raise(ErrorCode::OpenProfile,
          "profile did not close: residual " + std::to_string(pc.closure_residual));

  // Self-intersection sweep in the (v mod 2 pi, u) cylinder.
  pc.simple = true;
  {
    const std::size_t Ms = M;
    auto vmod = [](double v) {
      double r = std::fmod(v, 2.0 * kPi);
      if (r < 0.0) r += 2.0 * kPi;
      return r;
    };
    std::vector<double> ax(Ms), ay(Ms), dx(Ms), dy(Ms);
    for (std::size_t k = 0; k < Ms; ++k) {
      const std::size_t kn = (k + 1) % Ms;
      ax[k] = vmod(pc.v[k]);
      ay[k] = pc.u[k];
      double dvk = pc.v[kn] - pc.v[k];
      if (kn == 0) dvk = pc.v[kn] + 2.0 * kPi * static_cast<double>(p) - pc.v[k];
      dx[k] = dvk;
      dy[k] = pc.u[kn] - pc.u[k];
    }
    auto crosses = [](double px, double py, double rx, double ry, double qx,
                      double qy, double sx, double sy) {
      const double rxs = rx * sy - ry * sx;
      if (rxs == 0.0) return false;
      const double qpx = qx - px, qpy = qy - py;
      const double t = (qpx * sy - qpy * sx) / rxs;
      const double u = (qpx * ry - qpy * rx) / rxs;
      return t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0;
    };
    for (std::size_t i = 0; i < Ms && pc.simple; ++i) {
      for (std::size_t j = i + 2; j < Ms; ++j) {
        if (i == 0 && j == Ms - 1) continue;
        const double ylo_i = std::min(ay[i], ay[i] + dy[i]);
        const double yhi_i = std::max(ay[i], ay[i] + dy[i]);
        const double ylo_j = std::min(ay[j], ay[j] + dy[j]);
        const double yhi_j = std::max(ay[j], ay[j] + dy[j]);
        if (ylo_i > yhi_j || ylo_j > yhi_i) continue;
        for (int shift = -1; shift <= 1; ++shift) {
          const double off = 2.0 * kPi * static_cast<double>(shift);
          if (crosses(ax[i], ay[i], dx[i], dy[i], ax[j] + off, ay[j], dx[j], dy[j])) {
            pc.simple = false;
            break;
          }
        }
        if (!pc.simple) break;
      }
    }
  }
  return pc;
}

TorusGrid emit_grid(const ProfileCurve& pc, std::size_t n_t, std::size_t n_th) {
  if (pc.s.empty()) raise(ErrorCode::BadInput, "profile curve has no samples");
  if (n_t < 4 || n_th < 4)
    raise(ErrorCode::BadInput, "grid needs at least 4 samples per axis");
  if (pc.s.size() < 2 * n_th)
    raise(ErrorCode::BadInput, "profile sampling too coarse for the grid");
  const double drift = 2.0 * kPi * static_cast<double>(pc.p) / pc.length;
  const std::size_t M = pc.s.size();
  std::vector<double> vper(M);
  for (std::size_t k = 0; k < M; ++k) vper[k] = pc.v[k] - drift * pc.s[k];

  TorusGrid g;
  g.n_t = n_t;
  g.n_th = n_th;
  g.provenance = "profile";
  g.set_meta_int("p", pc.p);
  g.set_meta_int("q", pc.q);
  g.set_meta("u0", pc.u0);
  g.set_meta("length", pc.length);
  g.set_meta("closure_residual", pc.closure_residual);
  g.points.resize(n_t * n_th);
  for (std::size_t j = 0; j < n_th; ++j) {
    const double x = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_th);
    const double sj = pc.length * static_cast<double>(j) / static_cast<double>(n_th);
    const double uj = trig_interp(pc.u, x);
    const double vj = drift * sj + trig_interp(vper, x);
    const double cu = std::cos(uj), su = std::sin(uj);
    const double cv = std::cos(vj), sv = std::sin(vj);
    for (std::size_t i = 0; i < n_t; ++i) {
      const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_t);
      g.at(i, j) = Vec4{{cu * std::cos(t), cu * std::sin(t), su * cv, su * sv}};
    }
  }
  return g;
}

TorusGrid emit_product_grid(const PsiSpec& spec, const ProductTorus& pt,
                            std::size_t n_t, std::size_t n_th) {
  TorusGrid g = make_product_grid(pt.r, n_t, n_th);
  if (spec.kind == PsiSpec::Kind::SqrtFamily) {
    g.set_meta("psi_a", spec.a);
    g.set_meta("psi_b", spec.b);
    g.set_meta("psi_c", spec.c);
  }
  g.set_meta("lambda1", pt.lambda1);
  g.set_meta("lambda2", pt.lambda2);
  return g;
}

void save_profile_csv(const ProfileCurve& pc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::BadInput, "cannot write profile file " + path);
  out << "s,u,v,du,dv,lambda_profile,lambda_orbit\n";
  for (std::size_t k = 0; k < pc.s.size(); ++k) {
    out << JsonWriter::num(pc.s[k]) << ',' << JsonWriter::num(pc.u[k]) << ','
        << JsonWriter::num(pc.v[k]) << ',' << JsonWriter::num(pc.du[k]) << ','
        << JsonWriter::num(pc.dv[k]) << ',' << JsonWriter::num(pc.lam_profile[k])
        << ',' << JsonWriter::num(pc.lam_orbit[k]) << "\n";
  }
}

}  // namespace wlab
