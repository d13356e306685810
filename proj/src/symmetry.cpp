#include "wlab/symmetry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "wlab/errors.hpp"

namespace wlab {

namespace {

double phi_slope(const PsiSpec& spec, double s) {
  return -(1.0 + eval_psi(spec, s).dpsi) / (2.0 * s);
}

// One RK4 sweep of phi' = f(s) phi from s_ref over n steps of size h,
// appending (s, phi) after every step.
void sweep(const PsiSpec& spec, double s_ref, double h, std::size_t n,
           std::vector<double>& s_out, std::vector<double>& p_out) {
  double s = s_ref, p = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double k1 = phi_slope(spec, s) * p;
    double k2 = phi_slope(spec, s + 0.5 * h) * (p + 0.5 * h * k1);
    double k3 = phi_slope(spec, s + 0.5 * h) * (p + 0.5 * h * k2);
    double k4 = phi_slope(spec, s + h) * (p + h * k3);
    p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s = s_ref + h * double(k + 1);
    s_out.push_back(s);
    p_out.push_back(p);
  }
}

struct Side {
  std::vector<double> s, p;
};

Side integrate_side(const PsiSpec& spec, double s_ref, double s_end,
                    std::size_t n) {
  Side out;
  if (n == 0) return out;
  sweep(spec, s_ref, (s_end - s_ref) / double(n), n, out.s, out.p);
  return out;
}

}  // namespace

double PhiTable::eval(double x) const {
  double slack = 1e-12 * std::max(1.0, std::abs(s_hi));
  if (x < s_lo - slack || x > s_hi + slack)
    raise(ErrorCode::RangeError,
          "spread outside the tabulated integrating-factor range");
  x = std::clamp(x, s_lo, s_hi);
  if (s.size() == 1) return phi[0];
  std::size_t k =
      std::upper_bound(s.begin(), s.end(), x) - s.begin();
  k = std::min(std::max<std::size_t>(k, 1), s.size() - 1) - 1;
  double h = s[k + 1] - s[k];
  double t = (x - s[k]) / h;
  double omt = 1.0 - t;
  double h00 = (1.0 + 2.0 * t) * omt * omt;
  double h10 = t * omt * omt;
  double h01 = t * t * (3.0 - 2.0 * t);
  double h11 = t * t * (t - 1.0);
  return h00 * phi[k] + h * h10 * dphi[k] + h01 * phi[k + 1] +
         h * h11 * dphi[k + 1];
}

PhiTable solve_phi(const PsiSpec& spec, double s_lo, double s_hi,
                   double s_ref) {
  if (!(s_lo > 0.0))
    raise(ErrorCode::RangeError, "integrating-factor ODE needs s_lo > 0");
  if (!(s_lo <= s_ref && s_ref <= s_hi))
    raise(ErrorCode::BadInput, "need s_lo <= s_ref <= s_hi");

  PhiTable out;
  out.s_lo = s_lo;
  out.s_hi = s_hi;
  out.s_ref = s_ref;

  double span = s_hi - s_lo;
  if (span == 0.0) {
    out.s = {s_ref};
    out.phi = {1.0};
    out.dphi = {phi_slope(spec, s_ref)};
    return out;
  }

  auto steps = [&](double len, std::size_t total) -> std::size_t {
    if (len <= 0.0) return 0;
    return std::max<std::size_t>(1, std::size_t(std::lround(
                                        double(total) * len / span)));
  };

  // Fixed-step order-4 integration, step-halved until the coarse and fine
  // solutions agree to 1e-12 at the coarse nodes.
  std::size_t total = 256;
  Side left, right;
  std::size_t nl = 0, nr = 0;
  for (;; total *= 2) {
    if (total > (std::size_t(1) << 21))
      raise(ErrorCode::ConvergenceFailure,
            "integrating-factor ODE did not reach step-halving agreement");
    nl = steps(s_ref - s_lo, total);
    nr = steps(s_hi - s_ref, total);
    left = integrate_side(spec, s_ref, s_lo, nl);
    right = integrate_side(spec, s_ref, s_hi, nr);
    Side left2 = integrate_side(spec, s_ref, s_lo, 2 * nl);
    Side right2 = integrate_side(spec, s_ref, s_hi, 2 * nr);
    double dev = 0.0;
    for (std::size_t k = 0; k < left.p.size(); ++k)
      dev = std::max(dev, std::abs(left.p[k] - left2.p[2 * k + 1]) /
                              std::max(1.0, std::abs(left.p[k])));
    for (std::size_t k = 0; k < right.p.size(); ++k)
      dev = std::max(dev, std::abs(right.p[k] - right2.p[2 * k + 1]) /
                              std::max(1.0, std::abs(right.p[k])));
    if (dev < 1e-12) {
      left = std::move(left2);
      right = std::move(right2);
      break;
    }
  }

  out.s.reserve(left.s.size() + right.s.size() + 1);
  out.phi.reserve(out.s.capacity());
  for (std::size_t k = left.s.size(); k-- > 0;) {
    out.s.push_back(left.s[k]);
    out.phi.push_back(left.p[k]);
  }
  out.s.push_back(s_ref);
  out.phi.push_back(1.0);
  for (std::size_t k = 0; k < right.s.size(); ++k) {
    out.s.push_back(right.s[k]);
    out.phi.push_back(right.p[k]);
  }
  out.dphi.resize(out.s.size());
  for (std::size_t k = 0; k < out.s.size(); ++k) {
    if (!(out.phi[k] > 0.0))
      raise(ErrorCode::ConvergenceFailure,
            "integrating factor lost positivity");
    out.dphi[k] = phi_slope(spec, out.s[k]) * out.phi[k];
  }
  return out;
}

ResidualSummary curvature_line_constancy(const CurvatureField& cf) {
  require_frames(cf);
  ResidualSummary r;
  r.name = "curvature_line_constancy";
  double sum = 0.0;
  for (std::size_t p = 0; p < cf.d1l1.size(); ++p) {
    double v = std::max(std::abs(cf.d1l1.a[p]), std::abs(cf.d1l2.a[p]));
    sum += v;
    if (v > r.max_abs) {
      r.max_abs = v;
      r.arg_i = p / cf.n_th;
      r.arg_j = p % cf.n_th;
    }
  }
  r.mean_abs = sum / double(cf.d1l1.size());
  // Alignment noise in the principal frame couples the profile derivative
  // into D_1, so the threshold carries the squared curvature scale.
  double scale = curvature_scale(cf);
  double nf = 128.0 / double(std::min(cf.n_t, cf.n_th));
  r.tolerance = 1e-8 * scale * scale * nf * nf;
  r.pass = r.max_abs <= r.tolerance;
  return r;
}

std::vector<Vec4> build_killing(const CurvatureField& cf,
                                const PhiTable& phi) {
  require_frames(cf);
  std::vector<Vec4> V(cf.lam1.size());
  for (std::size_t p = 0; p < V.size(); ++p)
    V[p] = cf.e1[p] * phi.eval(cf.lam1.a[p] - cf.lam2.a[p]);
  return V;
}

SymmetryFit fit_Q(const TorusGrid& grid, const std::vector<Vec4>& V,
                  const CurvatureField* cf) {
  std::size_t n = grid.points.size();
  if (V.size() != n)
    raise(ErrorCode::BadInput, "Killing field size does not match the grid");

  // Unknowns x = (q01, q02, q03, q12, q13, q23); each point contributes the
  // four rows of (Q F)_i - V_i.
  Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
  for (std::size_t p = 0; p < n; ++p) {
    const Vec4& F = grid.points[p];
    Eigen::Matrix<double, 4, 6> A = Eigen::Matrix<double, 4, 6>::Zero();
    A(0, 0) = F[1];
    A(0, 1) = F[2];
    A(0, 2) = F[3];
    A(1, 0) = -F[0];
    A(1, 3) = F[2];
    A(1, 4) = F[3];
    A(2, 1) = -F[0];
    A(2, 3) = -F[1];
    A(2, 5) = F[3];
    A(3, 2) = -F[0];
    A(3, 4) = -F[1];
    A(3, 5) = -F[2];
    Eigen::Matrix<double, 4, 1> v;
    v << V[p][0], V[p][1], V[p][2], V[p][3];
    M.noalias() += A.transpose() * A;
    b.noalias() += A.transpose() * v;
  }

  SymmetryFit fit;
  {
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(M);
    double smin = svd.singularValues()(5);
    double smax = svd.singularValues()(0);
    fit.condition = (smin > 0.0) ? smax / smin
                                 : std::numeric_limits<double>::infinity();
    if (!(fit.condition <= 1e12))
      raise(ErrorCode::IllConditioned,
            "normal equations for Q are ill-conditioned");
  }
  Eigen::Matrix<double, 6, 1> x = M.ldlt().solve(b);

  fit.Q[0][1] = x(0);
  fit.Q[0][2] = x(1);
  fit.Q[0][3] = x(2);
  fit.Q[1][2] = x(3);
  fit.Q[1][3] = x(4);
  fit.Q[2][3] = x(5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) fit.Q[i][j] = -fit.Q[j][i];

  auto apply_q = [&](const Vec4& F) {
    Vec4 out;
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) acc += fit.Q[i][j] * F[j];
      out[i] = acc;
    }
    return out;
  };

  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    Vec4 qf = apply_q(grid.points[p]);
    Vec4 diff = qf - V[p];
    num += dot(diff, diff);
    den += dot(V[p], V[p]);
    fit.tangency_F = std::max(fit.tangency_F,
                              std::abs(dot(qf, grid.points[p])));
    if (cf)
      fit.tangency_nu =
          std::max(fit.tangency_nu, std::abs(dot(qf, cf->nu[p])));
  }
  if (den == 0.0)
    raise(ErrorCode::BadInput, "Killing field vanishes identically");
  fit.fit_residual = std::sqrt(num / den);

  Eigen::Matrix4d Qm;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Qm(i, j) = fit.Q[i][j];
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(Qm);
  for (int i = 0; i < 4; ++i) fit.singular_values[i] = svd.singularValues()(i);
  constexpr double kRankTol = 1e-6;
  double s0 = fit.singular_values[0];
  fit.rank2 = s0 > 0.0 && fit.singular_values[1] > kRankTol * s0 &&
              fit.singular_values[2] < kRankTol * s0;
  return fit;
}

std::pair<double, double> lie_derivative_residuals(
    const CurvatureField& cf, const std::vector<Vec4>& V) {
  std::size_t nt = cf.n_t, nth = cf.n_th, n = nt * nth;
  if (V.size() != n)
    raise(ErrorCode::BadInput, "Killing field size does not match the grid");

  // Coordinate components of the tangent field V = v1 d_t + v2 d_th.
  Field2D v1(nt, nth), v2(nt, nth);
  for (std::size_t p = 0; p < n; ++p) {
    Vec4 Ft{{cf.Ft[0].a[p], cf.Ft[1].a[p], cf.Ft[2].a[p], cf.Ft[3].a[p]}};
    Vec4 Fh{{cf.Fth[0].a[p], cf.Fth[1].a[p], cf.Fth[2].a[p], cf.Fth[3].a[p]}};
    double b1 = dot(V[p], Ft);
    double b2 = dot(V[p], Fh);
    double det = cf.detg.a[p];
    v1.a[p] = (cf.g22.a[p] * b1 - cf.g12.a[p] * b2) / det;
    v2.a[p] = (cf.g11.a[p] * b2 - cf.g12.a[p] * b1) / det;
  }

  Field2D v1_1 = diff_axis(cf.dm_t, v1, 0, 1);
  Field2D v1_2 = diff_axis(cf.dm_th, v1, 1, 1);
  Field2D v2_1 = diff_axis(cf.dm_t, v2, 0, 1);
  Field2D v2_2 = diff_axis(cf.dm_th, v2, 1, 1);

  auto lie_max = [&](const Field2D& a11, const Field2D& a12,
                     const Field2D& a22) {
    Field2D a11_1 = diff_axis(cf.dm_t, a11, 0, 1);
    Field2D a11_2 = diff_axis(cf.dm_th, a11, 1, 1);
    Field2D a12_1 = diff_axis(cf.dm_t, a12, 0, 1);
    Field2D a12_2 = diff_axis(cf.dm_th, a12, 1, 1);
    Field2D a22_1 = diff_axis(cf.dm_t, a22, 0, 1);
    Field2D a22_2 = diff_axis(cf.dm_th, a22, 1, 1);
    double mx = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double adv11 = v1.a[p] * a11_1.a[p] + v2.a[p] * a11_2.a[p];
      double adv12 = v1.a[p] * a12_1.a[p] + v2.a[p] * a12_2.a[p];
      double adv22 = v1.a[p] * a22_1.a[p] + v2.a[p] * a22_2.a[p];
      double l11 =
          adv11 + 2.0 * (a11.a[p] * v1_1.a[p] + a12.a[p] * v2_1.a[p]);
      double l12 = adv12 + a11.a[p] * v1_2.a[p] + a12.a[p] * v2_2.a[p] +
                   a12.a[p] * v1_1.a[p] + a22.a[p] * v2_1.a[p];
      double l22 =
          adv22 + 2.0 * (a12.a[p] * v1_2.a[p] + a22.a[p] * v2_2.a[p]);
      mx = std::max({mx, std::abs(l11), std::abs(l12), std::abs(l22)});
    }
    return mx;
  };

  return {lie_max(cf.g11, cf.g12, cf.g22),
          lie_max(cf.h11, cf.h12, cf.h22)};
}

}  // namespace wlab
