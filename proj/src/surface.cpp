#include "wlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wlab/errors.hpp"
#include "wlab/kernels.hpp"

namespace wlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Mat2 {
  double a11, a12, a22;  // symmetric
};

}  // namespace

CurvatureField analyze(const TorusGrid& grid, DiffScheme scheme, const PsiSpec* psi) {
  grid.validate();
  CurvatureField cf;
  cf.n_t = grid.n_t;
  cf.n_th = grid.n_th;
  cf.scheme = scheme;
  const std::size_t nt = grid.n_t, nth = grid.n_th, np = nt * nth;

  cf.dm_t = build_diff(nt, scheme);
  cf.dm_th = build_diff(nth, scheme);

  for (int c = 0; c < 4; ++c) {
    cf.comp[c] = Field2D(nt, nth);
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nth; ++j) cf.comp[c].at(i, j) = grid.at(i, j)[c];
  }
  std::array<Field2D, 4> Ftt, Fthth, Ftth;
  for (int c = 0; c < 4; ++c) {
    cf.Ft[c] = diff_axis(cf.dm_t, cf.comp[c], 0, 1);
    cf.Fth[c] = diff_axis(cf.dm_th, cf.comp[c], 1, 1);
    Ftt[c] = diff_axis(cf.dm_t, cf.comp[c], 0, 2);
    Fthth[c] = diff_axis(cf.dm_th, cf.comp[c], 1, 2);
    Ftth[c] = diff_axis(cf.dm_th, cf.Ft[c], 1, 1);
  }

  auto vec_at = [](const std::array<Field2D, 4>& f, std::size_t i, std::size_t j) {
    return Vec4{{f[0].at(i, j), f[1].at(i, j), f[2].at(i, j), f[3].at(i, j)}};
  };

  cf.g11 = Field2D(nt, nth);
  cf.g12 = Field2D(nt, nth);
  cf.g22 = Field2D(nt, nth);
  cf.detg = Field2D(nt, nth);
  cf.nu.resize(np);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      const Vec4 F = grid.at(i, j);
      const Vec4 Ft = vec_at(cf.Ft, i, j);
      const Vec4 Fh = vec_at(cf.Fth, i, j);
      const double a = dot(Ft, Ft), b = dot(Ft, Fh), c = dot(Fh, Fh);
      cf.g11.at(i, j) = a;
      cf.g12.at(i, j) = b;
      cf.g22.at(i, j) = c;
      const double det = a * c - b * b;
      cf.detg.at(i, j) = det;
      if (!(det > 0.0) || std::sqrt(std::max(det, 0.0)) < 1e-10 * (a + c))
        raise(ErrorCode::DegenerateImmersion,
              "tangent plane degenerates at grid point (" + std::to_string(i) +
                  ", " + std::to_string(j) + ")");
      const Vec4 nraw = cross4(F, Ft, Fh);
      const double nn = norm(nraw);
      if (nn < 1e-12) raise(ErrorCode::DegenerateImmersion, "vanishing normal");
      cf.nu[i * nth + j] = nraw * (1.0 / nn);
    }

  cf.h11 = Field2D(nt, nth);
  cf.h12 = Field2D(nt, nth);
  cf.h22 = Field2D(nt, nth);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      const Vec4& n = cf.nu[i * nth + j];
      cf.h11.at(i, j) = dot(vec_at(Ftt, i, j), n);
      cf.h12.at(i, j) = dot(vec_at(Ftth, i, j), n);
      cf.h22.at(i, j) = dot(vec_at(Fthth, i, j), n);
    }

  // Orient the normal so the mean curvature is positive everywhere.  Points
  // with |trace| below an absolute floor carry no reliable sign; a grid that
  // is indeterminate everywhere (a minimal torus) keeps the raw orientation.
  {
    constexpr double kSignFloor = 1e-6;
    bool any_pos = false, any_neg = false;
    for (std::size_t k = 0; k < np; ++k) {
      const std::size_t i = k / nth, j = k % nth;
      const double tr = (cf.g22.at(i, j) * cf.h11.at(i, j) -
                         2.0 * cf.g12.at(i, j) * cf.h12.at(i, j) +
                         cf.g11.at(i, j) * cf.h22.at(i, j)) /
                        cf.detg.at(i, j);
      if (tr > kSignFloor) any_pos = true;
      if (tr < -kSignFloor) any_neg = true;
    }
    if (any_pos && any_neg)
      raise(ErrorCode::DegenerateImmersion,
            "mean curvature changes sign; no mean-convex orientation exists");
    if (any_neg) {
      for (std::size_t k = 0; k < np; ++k) {
        cf.nu[k] = cf.nu[k] * -1.0;
        cf.h11.a[k] = -cf.h11.a[k];
        cf.h12.a[k] = -cf.h12.a[k];
        cf.h22.a[k] = -cf.h22.a[k];
      }
    }
  }

  cf.lam1 = Field2D(nt, nth);
  cf.lam2 = Field2D(nt, nth);
  cf.e1c1 = Field2D(nt, nth);
  cf.e1c2 = Field2D(nt, nth);
  cf.e2c1 = Field2D(nt, nth);
  cf.e2c2 = Field2D(nt, nth);
  cf.e1.resize(np);
  cf.e2.resize(np);
  cf.min_spread = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      const Mat2 g{cf.g11.at(i, j), cf.g12.at(i, j), cf.g22.at(i, j)};
      const Mat2 h{cf.h11.at(i, j), cf.h12.at(i, j), cf.h22.at(i, j)};
      const double det = cf.detg.at(i, j);
      const double tr = (g.a22 * h.a11 - 2.0 * g.a12 * h.a12 + g.a11 * h.a22) / det;
      const double dh = (h.a11 * h.a22 - h.a12 * h.a12) / det;
      const double disc = std::max(tr * tr - 4.0 * dh, 0.0);
      const double sq = std::sqrt(disc);
      const double l1 = 0.5 * (tr + sq), l2 = 0.5 * (tr - sq);
      cf.lam1.at(i, j) = l1;
      cf.lam2.at(i, j) = l2;
      const double spread = l1 - l2;
      if (spread < cf.min_spread) {
        cf.min_spread = spread;
        cf.spread_i = i;
        cf.spread_j = j;
      }

      // Null vector of (h - lambda1 g): take the larger of the two rows of the
      // adjugate for stability.
      const double r1x = h.a11 - l1 * g.a11, r1y = h.a12 - l1 * g.a12;
      const double r2x = h.a12 - l1 * g.a12, r2y = h.a22 - l1 * g.a22;
      double vx, vy;
      if (r1x * r1x + r1y * r1y >= r2x * r2x + r2y * r2y) {
        vx = -r1y;
        vy = r1x;
      } else {
        vx = -r2y;
        vy = r2x;
      }
      const double vv = vx * (g.a11 * vx + g.a12 * vy) + vy * (g.a12 * vx + g.a22 * vy);
      if (vv > 0.0) {
        const double inv = 1.0 / std::sqrt(vv);
        vx *= inv;
        vy *= inv;
      } else {
        // Umbilic point: direction undefined, fall back to the t axis.
        cf.frames_ok = false;
        vx = 1.0 / std::sqrt(g.a11);
        vy = 0.0;
      }
      // g-orthogonal complement, oriented so det(v, w) > 0.
      const double px = g.a11 * vx + g.a12 * vy, py = g.a12 * vx + g.a22 * vy;
      double wx = -py / det, wy = px / det;  // g^{-1} applied to (-py, px)
      const double ww = wx * (g.a11 * wx + g.a12 * wy) + wy * (g.a12 * wx + g.a22 * wy);
      const double winv = 1.0 / std::sqrt(ww);
      wx *= winv;
      wy *= winv;
      cf.e1c1.at(i, j) = vx;
      cf.e1c2.at(i, j) = vy;
      cf.e2c1.at(i, j) = wx;
      cf.e2c2.at(i, j) = wy;
    }

  if (cf.min_spread < 1e-8) cf.frames_ok = false;

  // Sign continuity of e1: seed toward +t at (0,0), then align with the
  // previous grid point row-major.  e2 follows through the fixed orientation.
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      double vx = cf.e1c1.at(i, j), vy = cf.e1c2.at(i, j);
      double wx = cf.e2c1.at(i, j), wy = cf.e2c2.at(i, j);
      bool flip = false;
      if (i == 0 && j == 0) {
        if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) flip = true;
      } else {
        const std::size_t pi = j > 0 ? i : i - 1;
        const std::size_t pj = j > 0 ? j - 1 : 0;
        const Mat2 g{cf.g11.at(i, j), cf.g12.at(i, j), cf.g22.at(i, j)};
        const double ip = vx * (g.a11 * cf.e1c1.at(pi, pj) + g.a12 * cf.e1c2.at(pi, pj)) +
                          vy * (g.a12 * cf.e1c1.at(pi, pj) + g.a22 * cf.e1c2.at(pi, pj));
        if (ip < 0.0) flip = true;
      }
      if (flip) {
        vx = -vx;
        vy = -vy;
        wx = -wx;
        wy = -wy;
        cf.e1c1.at(i, j) = vx;
        cf.e1c2.at(i, j) = vy;
        cf.e2c1.at(i, j) = wx;
        cf.e2c2.at(i, j) = wy;
      }
      const Vec4 Ft = vec_at(cf.Ft, i, j);
      const Vec4 Fh = vec_at(cf.Fth, i, j);
      cf.e1[i * nth + j] = Ft * vx + Fh * vy;
      cf.e2[i * nth + j] = Ft * wx + Fh * wy;
    }

  // Christoffel symbols from first derivatives of the metric.
  {
    Field2D dg[2][3];
    dg[0][0] = diff_axis(cf.dm_t, cf.g11, 0, 1);
    dg[0][1] = diff_axis(cf.dm_t, cf.g12, 0, 1);
    dg[0][2] = diff_axis(cf.dm_t, cf.g22, 0, 1);
    dg[1][0] = diff_axis(cf.dm_th, cf.g11, 1, 1);
    dg[1][1] = diff_axis(cf.dm_th, cf.g12, 1, 1);
    dg[1][2] = diff_axis(cf.dm_th, cf.g22, 1, 1);
    for (int c = 0; c < 2; ++c)
      for (int ab = 0; ab < 3; ++ab) cf.gam[c][ab] = Field2D(nt, nth);
    auto gidx = [](int u, int v) { return u == 0 ? (v == 0 ? 0 : 1) : (v == 0 ? 1 : 2); };
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nth; ++j) {
        const double det = cf.detg.at(i, j);
        const double gi[2][2] = {{cf.g22.at(i, j) / det, -cf.g12.at(i, j) / det},
                                 {-cf.g12.at(i, j) / det, cf.g11.at(i, j) / det}};
        for (int cc = 0; cc < 2; ++cc)
          for (int aa = 0; aa < 2; ++aa)
            for (int bb = aa; bb < 2; ++bb) {
              double s = 0.0;
              for (int dd = 0; dd < 2; ++dd) {
                const double t1 = dg[aa][gidx(dd, bb)].at(i, j);
                const double t2 = dg[bb][gidx(dd, aa)].at(i, j);
                const double t3 = dg[dd][gidx(aa, bb)].at(i, j);
                s += gi[cc][dd] * (t1 + t2 - t3);
              }
              cf.gam[cc][gidx(aa, bb)].at(i, j) = 0.5 * s;
            }
      }
  }

  // Principal curvature gradients along the frame.
  cf.d1l1 = Field2D(nt, nth);
  cf.d2l1 = Field2D(nt, nth);
  cf.d1l2 = Field2D(nt, nth);
  cf.d2l2 = Field2D(nt, nth);
  directional_derivs(cf, cf.lam1, cf.d1l1, cf.d2l1);
  directional_derivs(cf, cf.lam2, cf.d1l2, cf.d2l2);

  cf.beta1 = Field2D(nt, nth, std::numeric_limits<double>::quiet_NaN());
  cf.beta2 = Field2D(nt, nth, std::numeric_limits<double>::quiet_NaN());
  if (psi != nullptr) {
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nth; ++j) {
        const BetaPair bp = beta_coeffs(*psi, cf.lam1.at(i, j) - cf.lam2.at(i, j));
        cf.beta1.at(i, j) = bp.b1;
        cf.beta2.at(i, j) = bp.b2;
      }
    cf.has_beta = true;
  }
  return cf;
}

void require_frames(const CurvatureField& cf) {
  if (!cf.frames_ok)
    raise(ErrorCode::UmbilicDegeneracy,
          "principal frame undefined: min spread " + std::to_string(cf.min_spread) +
              " at (" + std::to_string(cf.spread_i) + ", " +
              std::to_string(cf.spread_j) + ")");
}

void directional_derivs(const CurvatureField& cf, const Field2D& f, Field2D& d1f,
                        Field2D& d2f) {
  const Field2D ft = diff_axis(cf.dm_t, f, 0, 1);
  const Field2D fh = diff_axis(cf.dm_th, f, 1, 1);
  d1f = Field2D(cf.n_t, cf.n_th);
  d2f = Field2D(cf.n_t, cf.n_th);
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      d1f.at(i, j) = cf.e1c1.at(i, j) * ft.at(i, j) + cf.e1c2.at(i, j) * fh.at(i, j);
      d2f.at(i, j) = cf.e2c1.at(i, j) * ft.at(i, j) + cf.e2c2.at(i, j) * fh.at(i, j);
    }
}

void covariant_hessian_diag(const CurvatureField& cf, const Field2D& f,
                            Field2D& ddf1, Field2D& ddf2) {
  const Field2D ft = diff_axis(cf.dm_t, f, 0, 1);
  const Field2D fh = diff_axis(cf.dm_th, f, 1, 1);
  const Field2D ftt = diff_axis(cf.dm_t, f, 0, 2);
  const Field2D fhh = diff_axis(cf.dm_th, f, 1, 2);
  const Field2D fth = diff_axis(cf.dm_th, ft, 1, 1);
  ddf1 = Field2D(cf.n_t, cf.n_th);
  ddf2 = Field2D(cf.n_t, cf.n_th);
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      // Coordinate Hessian minus the connection term.
      const double H11 = ftt.at(i, j) - cf.gam[0][0].at(i, j) * ft.at(i, j) -
                         cf.gam[1][0].at(i, j) * fh.at(i, j);
      const double H12 = fth.at(i, j) - cf.gam[0][1].at(i, j) * ft.at(i, j) -
                         cf.gam[1][1].at(i, j) * fh.at(i, j);
      const double H22 = fhh.at(i, j) - cf.gam[0][2].at(i, j) * ft.at(i, j) -
                         cf.gam[1][2].at(i, j) * fh.at(i, j);
      {
        const double a = cf.e1c1.at(i, j), b = cf.e1c2.at(i, j);
        ddf1.at(i, j) = a * a * H11 + 2.0 * a * b * H12 + b * b * H22;
      }
      {
        const double a = cf.e2c1.at(i, j), b = cf.e2c2.at(i, j);
        ddf2.at(i, j) = a * a * H11 + 2.0 * a * b * H12 + b * b * H22;
      }
    }
}

SecondFormCheck second_form_via_normal(const CurvatureField& cf) {
  std::array<Field2D, 4> nc, nt_, nth_;
  for (int c = 0; c < 4; ++c) {
    nc[c] = Field2D(cf.n_t, cf.n_th);
    for (std::size_t i = 0; i < cf.n_t; ++i)
      for (std::size_t j = 0; j < cf.n_th; ++j) nc[c].at(i, j) = cf.nu[i * cf.n_th + j][c];
  }
  for (int c = 0; c < 4; ++c) {
    nt_[c] = diff_axis(cf.dm_t, nc[c], 0, 1);
    nth_[c] = diff_axis(cf.dm_th, nc[c], 1, 1);
  }
  SecondFormCheck out;
  out.h11 = Field2D(cf.n_t, cf.n_th);
  out.h12 = Field2D(cf.n_t, cf.n_th);
  out.h21 = Field2D(cf.n_t, cf.n_th);
  out.h22 = Field2D(cf.n_t, cf.n_th);
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      double s11 = 0.0, s12 = 0.0, s21 = 0.0, s22 = 0.0;
      for (int c = 0; c < 4; ++c) {
        s11 += nt_[c].at(i, j) * cf.Ft[c].at(i, j);
        s12 += nt_[c].at(i, j) * cf.Fth[c].at(i, j);
        s21 += nth_[c].at(i, j) * cf.Ft[c].at(i, j);
        s22 += nth_[c].at(i, j) * cf.Fth[c].at(i, j);
      }
      out.h11.at(i, j) = -s11;
      out.h12.at(i, j) = -s12;
      out.h21.at(i, j) = -s21;
      out.h22.at(i, j) = -s22;
    }
  return out;
}

UmbilicDiagnostics umbilic_diagnostics(const CurvatureField& cf) {
  UmbilicDiagnostics d;
  d.min_spread = cf.min_spread;
  if (!(cf.min_spread >= 1e-8)) {
    d.winding_t = std::numeric_limits<double>::quiet_NaN();
    d.winding_th = std::numeric_limits<double>::quiet_NaN();
    return d;
  }
  // Angle of e1 against the Gram-Schmidt coordinate frame, doubled because
  // the principal direction is a line field.
  Field2D ang(cf.n_t, cf.n_th);
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double a = cf.g11.at(i, j), b = cf.g12.at(i, j);
      const double det = cf.detg.at(i, j);
      // e1 = vx d_t + vy d_th; components in the orthonormal frame
      // u = d_t/|d_t|, v = (d_th - proj) normalized.
      const double vx = cf.e1c1.at(i, j), vy = cf.e1c2.at(i, j);
      const double cu = (a * vx + b * vy) / std::sqrt(a);
      const double cv = vy * std::sqrt(det / a);
      ang.at(i, j) = 2.0 * std::atan2(cv, cu);
    }
  auto loop_winding = [&](bool along_t) {
    const std::size_t n = along_t ? cf.n_t : cf.n_th;
    double total = 0.0, prev = ang.at(0, 0);
    for (std::size_t k = 1; k <= n; ++k) {
      const std::size_t i = along_t ? (k % cf.n_t) : 0;
      const std::size_t j = along_t ? 0 : (k % cf.n_th);
      const double cur = ang.at(i, j);
      total += std::remainder(cur - prev, 2.0 * kPi);
      prev = cur;
    }
    return std::round(total / (2.0 * kPi));
  };
  d.winding_t = loop_winding(true);
  d.winding_th = loop_winding(false);
  return d;
}

ConformalData conformal_data(const TorusGrid& grid, const CurvatureField& cf,
                             std::size_t n_tau) {
  if (grid.provenance != "product" && grid.provenance != "profile")
    raise(ErrorCode::NotConformalizable,
          "conformal reduction requires a rotational grid, got provenance '" +
              grid.provenance + "'");
  const std::size_t nt = cf.n_t, nth = cf.n_th;
  if (n_tau == 0) n_tau = nth;

  // Rotational structure: the metric must be diagonal with g22 constant and
  // g11 = w(th)^2 independent of t.
  double gscale = 0.0;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j)
      gscale = std::max(gscale, std::max(cf.g11.at(i, j), cf.g22.at(i, j)));
  double c2 = 0.0;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) c2 += cf.g22.at(i, j);
  c2 /= static_cast<double>(nt * nth);
  std::vector<double> w(nth), g11row(nth);
  for (std::size_t j = 0; j < nth; ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < nt; ++i) m += cf.g11.at(i, j);
    m /= static_cast<double>(nt);
    g11row[j] = m;
    if (m <= 0.0) raise(ErrorCode::DivisionDegeneracy, "orbit radius vanished");
    w[j] = std::sqrt(m);
  }
  // The gate separates rotational grids (deviations at discretization level)
  // from genuinely non-rotational input (deviations of order one); accuracy
  // itself is quantified downstream by the residual checks.
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      const double dev = std::max(
          {std::abs(cf.g12.at(i, j)), std::abs(cf.g22.at(i, j) - c2),
           std::abs(cf.g11.at(i, j) - g11row[j])});
      if (dev > 1e-3 * gscale)
        raise(ErrorCode::NotConformalizable,
              "metric is not in rotational form at (" + std::to_string(i) +
                  ", " + std::to_string(j) + "): deviation " +
                  std::to_string(dev));
    }
  const double c = std::sqrt(c2);

  // tau(th) by trapezoidal accumulation of c/w, then inversion of the
  // band-limited representation of the periodic part.
  const double hth = 2.0 * kPi / static_cast<double>(nth);
  std::vector<double> integ(nth);
  for (std::size_t j = 0; j < nth; ++j) integ[j] = c / w[j];
  std::vector<double> tau(nth + 1);
  tau[0] = 0.0;
  for (std::size_t j = 0; j < nth; ++j) {
    const double f1 = integ[j], f2 = integ[(j + 1) % nth];
    tau[j + 1] = tau[j] + 0.5 * hth * (f1 + f2);
  }
  const double T = tau[nth];
  std::vector<double> dev(nth);
  for (std::size_t j = 0; j < nth; ++j)
    dev[j] = tau[j] - T * static_cast<double>(j) / static_cast<double>(nth);

  auto tau_of = [&](double th) {
    return T * th / (2.0 * kPi) + trig_interp(dev, th);
  };
  auto dtau_of = [&](double th) {
    return T / (2.0 * kPi) + trig_interp_deriv(dev, th);
  };

  // th(tau-hat_k) for the uniform tau grid: the accumulated tau array brackets
  // each target between neighboring nodes, then safeguarded Newton refines
  // inside the bracket (bisection fallback keeps steep necks convergent).
  std::vector<double> th_of_tau(n_tau);
  std::size_t jlo = 0;
  for (std::size_t k = 0; k < n_tau; ++k) {
    const double target = T * static_cast<double>(k) / static_cast<double>(n_tau);
    while (jlo + 1 < nth && tau[jlo + 1] <= target) ++jlo;
    double lo = hth * static_cast<double>(jlo);
    double hi = hth * static_cast<double>(jlo + 1);
    // Widen until the band-limited map straddles the target (the interpolant
    // can overshoot the nodal values by a fraction of a cell).
    for (int e = 0; e < 4 && tau_of(lo) > target; ++e) lo -= hth;
    for (int e = 0; e < 4 && tau_of(hi) < target; ++e) hi += hth;
    double th = 0.5 * (lo + hi);
    const double span = tau[jlo + 1] - tau[jlo];
    if (span > 0.0)
      th = hth * (static_cast<double>(jlo) + (target - tau[jlo]) / span);
    if (!(th > lo && th < hi)) th = 0.5 * (lo + hi);
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      const double f = tau_of(th) - target;
      if (f > 0.0)
        hi = th;
      else
        lo = th;
      const double d = dtau_of(th);
      double next = d > 0.0 ? th - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double moved = std::abs(next - th);
      th = next;
      if (moved < 1e-15 * 2.0 * kPi || hi - lo < 1e-15 * 2.0 * kPi) {
        ok = true;
        break;
      }
    }
    if (!ok) raise(ErrorCode::ConvergenceFailure, "profile reparametrization");
    th_of_tau[k] = th;
  }

  // Band-limited resampling matrix along the profile axis.
  std::vector<double> R(n_tau * nth);
  for (std::size_t k = 0; k < n_tau; ++k)
    for (std::size_t j = 0; j < nth; ++j)
      R[k * nth + j] = trig_cardinal(nth, th_of_tau[k] - hth * static_cast<double>(j));

  auto resample = [&](const Field2D& f) {
    const Field2D ftr = transpose(f);  // nth x nt
    Field2D outt(n_tau, nt);
    kernels::apply_dmat(R.data(), ftr.a.data(), outt.a.data(), n_tau, nth, nt);
    return transpose(outt);  // nt x n_tau
  };

  // Second-form components in (tau, t) coordinates, still on the th grid.
  Field2D htautau(nt, nth), htaut(nt, nth);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nth; ++j) {
      const double fac = w[j] / c;
      htautau.at(i, j) = fac * fac * cf.h22.at(i, j);
      htaut.at(i, j) = fac * cf.h12.at(i, j);
    }

  ConformalData cd;
  cd.n_t = nt;
  cd.n_tau = n_tau;
  cd.T = T;
  cd.c = c;
  cd.w_tau.resize(n_tau);
  for (std::size_t k = 0; k < n_tau; ++k) cd.w_tau[k] = trig_interp(w, th_of_tau[k]);
  const Field2D htt_r = resample(cf.h11);
  const Field2D htautau_r = resample(htautau);
  const Field2D htaut_r = resample(htaut);
  cd.lam1 = resample(cf.lam1);
  cd.lam2 = resample(cf.lam2);
  cd.rho = Field2D(nt, n_tau);
  cd.hzz_re = Field2D(nt, n_tau);
  cd.hzz_im = Field2D(nt, n_tau);
  cd.hzzb = Field2D(nt, n_tau);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t k = 0; k < n_tau; ++k) {
      cd.rho.at(i, k) = std::log(0.5 * cd.w_tau[k]);
      cd.hzz_re.at(i, k) = 0.25 * (htautau_r.at(i, k) - htt_r.at(i, k));
      cd.hzz_im.at(i, k) = -0.5 * htaut_r.at(i, k);
      cd.hzzb.at(i, k) = 0.25 * (htautau_r.at(i, k) + htt_r.at(i, k));
    }
  return cd;
}

}  // namespace wlab
