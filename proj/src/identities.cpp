#include "wlab/identities.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "wlab/errors.hpp"
#include "wlab/jsonw.hpp"
#include "wlab/spectral.hpp"

namespace wlab {

namespace {

// Accumulates max/mean/argmax of |r| (or of signed r when signed_max).
struct Stat {
  double mx = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t n = 0, ai = 0, aj = 0;
  bool signed_max = false;

  void add(double r, std::size_t i, std::size_t j) {
    const double key = signed_max ? r : std::abs(r);
    if (key > mx) {
      mx = key;
      ai = i;
      aj = j;
    }
    sum += std::abs(r);
    ++n;
  }
  void fill(ResidualSummary& rs) const {
    rs.max_abs = mx;
    rs.mean_abs = n ? sum / static_cast<double>(n) : 0.0;
    rs.arg_i = ai;
    rs.arg_j = aj;
    rs.pass = rs.max_abs <= rs.tolerance;
  }
};

double res_factor(std::size_t n) {
  const double nn = static_cast<double>(n);
  return (128.0 / nn) * (128.0 / nn);
}

}  // namespace

double curvature_scale(const CurvatureField& cf) {
  double s = 1.0;
  for (double v : cf.lam1.a) s = std::max(s, std::abs(v));
  for (double v : cf.lam2.a) s = std::max(s, std::abs(v));
  return s;
}

double weingarten_tolerance(double scale, std::size_t n) {
  return 2e-9 * scale * scale * res_factor(n);
}
double gradient_tolerance(double scale, std::size_t n) {
  return 1e-7 * scale * scale * res_factor(n);
}
double simons_tolerance(double scale, std::size_t n) {
  return 1e-6 * scale * scale * scale * res_factor(n);
}
double conformal_algebraic_tolerance(double scale, std::size_t n) {
  return 1e-8 * scale * res_factor(n);
}
double beltrami_tolerance(double scale, std::size_t n) {
  return 1e-5 * scale * scale * scale * res_factor(n);
}

ResidualSummary weingarten_residual(const CurvatureField& cf, const PsiSpec& spec) {
  ResidualSummary rs;
  rs.name = "weingarten";
  rs.tolerance =
      weingarten_tolerance(curvature_scale(cf), std::min(cf.n_t, cf.n_th));
  Stat st;
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double l1 = cf.lam1.at(i, j), l2 = cf.lam2.at(i, j);
      st.add(l1 + l2 - eval_psi(spec, l1 - l2).psi, i, j);
    }
  st.fill(rs);
  return rs;
}

ResidualSummary gradient_constraint_residual(const CurvatureField& cf) {
  if (!cf.has_beta)
    raise(ErrorCode::BadInput,
          "beta coefficients absent: analyze the grid with its relation");
  require_frames(cf);
  ResidualSummary rs;
  rs.name = "gradient_constraint";
  rs.tolerance =
      gradient_tolerance(curvature_scale(cf), std::min(cf.n_t, cf.n_th));
  Stat st;
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double b1 = cf.beta1.at(i, j), b2 = cf.beta2.at(i, j);
      const double rk1 = b1 * cf.d1l1.at(i, j) + b2 * cf.d1l2.at(i, j);
      const double rk2 = b1 * cf.d2l1.at(i, j) + b2 * cf.d2l2.at(i, j);
      st.add(std::max(std::abs(rk1), std::abs(rk2)), i, j);
    }
  st.fill(rs);
  return rs;
}

std::pair<ResidualSummary, ResidualSummary> simons_residual(
    const CurvatureField& cf, const PsiSpec& spec) {
  require_frames(cf);
  Field2D h1l1, h2l1, h1l2, h2l2;
  covariant_hessian_diag(cf, cf.lam1, h1l1, h2l1);
  covariant_hessian_diag(cf, cf.lam2, h1l2, h2l2);

  ResidualSummary r1, r2;
  r1.name = "simons_lambda1";
  r2.name = "simons_lambda2";
  const double tol =
      simons_tolerance(curvature_scale(cf), std::min(cf.n_t, cf.n_th));
  r1.tolerance = r2.tolerance = tol;
  Stat s1, s2;
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double l1 = cf.lam1.at(i, j), l2 = cf.lam2.at(i, j);
      const double spread = l1 - l2;
      const PsiEval pe = eval_psi(spec, spread);
      const double b1 = 1.0 - pe.dpsi, b2 = 1.0 + pe.dpsi;
      const double d1l2 = cf.d1l2.at(i, j), d2l1 = cf.d2l1.at(i, j);
      const double grad2 = d1l2 * d1l2 + d2l1 * d2l1;
      const double bsum2 = (b1 + b2) * (b1 + b2);

      const double lhs1 = b1 * h1l1.at(i, j) + b2 * h2l1.at(i, j) +
                          (b1 * (l1 * l1 - 1.0) + b2 * (l2 * l2 - 1.0)) * l1 -
                          (b1 * l1 + b2 * l2) * (l1 * l1 - 1.0);
      const double rhs1 = 2.0 * b2 / spread * grad2 +
                          pe.ddpsi * bsum2 / (b1 * b1) * (d1l2 * d1l2);
      s1.add(lhs1 - rhs1, i, j);

      const double lhs2 = b1 * h1l2.at(i, j) + b2 * h2l2.at(i, j) +
                          (b1 * (l1 * l1 - 1.0) + b2 * (l2 * l2 - 1.0)) * l2 -
                          (b1 * l1 + b2 * l2) * (l2 * l2 - 1.0);
      const double rhs2 = -2.0 * b1 / spread * grad2 +
                          pe.ddpsi * bsum2 / (b2 * b2) * (d2l1 * d2l1);
      s2.add(lhs2 - rhs2, i, j);
    }
  s1.fill(r1);
  s2.fill(r2);
  return {r1, r2};
}

BarrierScan barrier_scan(const CurvatureField& cf, const PsiSpec& spec,
                         double alpha) {
  if (!(alpha > 1.0)) raise(ErrorCode::BadInput, "barrier exponent must exceed 1");
  require_frames(cf);

  Field2D phi(cf.n_t, cf.n_th);
  for (std::size_t k = 0; k < phi.a.size(); ++k)
    phi.a[k] = alpha * cf.lam1.a[k] - (alpha - 1.0) * cf.lam2.a[k];
  Field2D d1phi, d2phi, h1phi, h2phi;
  directional_derivs(cf, phi, d1phi, d2phi);
  covariant_hessian_diag(cf, phi, h1phi, h2phi);

  BarrierScan bs;
  bs.alpha = alpha;
  bs.lhs.name = "barrier_alpha_" + JsonWriter::num(alpha);
  const double scale = curvature_scale(cf);
  bs.lhs.tolerance = -1e-10 * scale * scale * scale;
  bs.min_beta_lambda = std::numeric_limits<double>::infinity();
  Stat st;
  st.signed_max = true;
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) {
      const double l1 = cf.lam1.at(i, j), l2 = cf.lam2.at(i, j);
      const PsiEval pe = eval_psi(spec, l1 - l2);
      const double b1 = 1.0 - pe.dpsi, b2 = 1.0 + pe.dpsi;
      const double p = phi.at(i, j);
      const double pm1 = p - l1, pm2 = p - l2;
      if (pm1 < 1e-12 || pm2 < 1e-12)
        raise(ErrorCode::DivisionDegeneracy,
              "barrier pivot Phi - lambda_i degenerates at grid point (" +
                  std::to_string(i) + ", " + std::to_string(j) + ")");
      const double v = b1 * h1phi.at(i, j) + b2 * h2phi.at(i, j) -
                       2.0 * (b1 / pm1 * d1phi.at(i, j) * d1phi.at(i, j) +
                              b2 / pm2 * d2phi.at(i, j) * d2phi.at(i, j)) +
                       (b1 * (l1 * l1 - 1.0) + b2 * (l2 * l2 - 1.0)) * p -
                       (b1 * l1 + b2 * l2) * (p * p - 1.0);
      st.add(v, i, j);
      bs.min_beta_lambda = std::min(bs.min_beta_lambda, b1 * l1 + b2 * l2);
    }
  st.fill(bs.lhs);
  return bs;
}

std::vector<ResidualSummary> conformal_residuals(const ConformalData& cd,
                                                 const CurvatureField& cf,
                                                 const PsiSpec& spec) {
  const std::size_t nt = cd.n_t, ntau = cd.n_tau;
  const double scale = curvature_scale(cf);
  const std::size_t nmin = std::min(nt, ntau);

  std::vector<ResidualSummary> out(3);
  out[0].name = "conformal_trace";
  out[1].name = "conformal_hopf";
  out[2].name = "beltrami";
  out[0].tolerance = out[1].tolerance = conformal_algebraic_tolerance(scale, nmin);
  out[2].tolerance = beltrami_tolerance(scale, nmin);

  Field2D e2rho(nt, ntau);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < ntau; ++j)
      e2rho.at(i, j) = std::exp(2.0 * cd.rho.at(i, j));

  Stat s0, s1;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < ntau; ++j) {
      const double l1 = cd.lam1.at(i, j), l2 = cd.lam2.at(i, j);
      const double mod =
          std::hypot(cd.hzz_re.at(i, j), cd.hzz_im.at(i, j));
      s0.add(cd.hzzb.at(i, j) - e2rho.at(i, j) * (l1 + l2), i, j);
      s1.add(mod - e2rho.at(i, j) * (l1 - l2), i, j);
    }
  s0.fill(out[0]);
  s1.fill(out[1]);

  // Beltrami-type equation.  z = tau + i t; the grid coordinate along axis 1
  // is tau-hat = 2 pi tau / T, so d/d tau = (2 pi / T) d/d tau-hat.
  const DiffMatrices dmt = build_diff(nt);
  const DiffMatrices dmtau = build_diff(ntau);
  const double jac = 2.0 * std::numbers::pi / cd.T;
  auto dz = [&](const Field2D& fre, const Field2D& fim, Field2D out_re[2],
                Field2D out_im[2]) {
    // out[0] = d_z f, out[1] = d_zbar f for complex f = fre + i fim:
    // d_z = (d_tau - i d_t)/2, d_zbar = (d_tau + i d_t)/2.
    const Field2D re_tau = diff_axis(dmtau, fre, 1, 1);
    const Field2D im_tau = diff_axis(dmtau, fim, 1, 1);
    const Field2D re_t = diff_axis(dmt, fre, 0, 1);
    const Field2D im_t = diff_axis(dmt, fim, 0, 1);
    out_re[0] = Field2D(nt, ntau);
    out_im[0] = Field2D(nt, ntau);
    out_re[1] = Field2D(nt, ntau);
    out_im[1] = Field2D(nt, ntau);
    for (std::size_t k = 0; k < fre.a.size(); ++k) {
      const double rt = jac * re_tau.a[k], it = jac * im_tau.a[k];
      out_re[0].a[k] = 0.5 * (rt + im_t.a[k]);
      out_im[0].a[k] = 0.5 * (it - re_t.a[k]);
      out_re[1].a[k] = 0.5 * (rt - im_t.a[k]);
      out_im[1].a[k] = 0.5 * (it + re_t.a[k]);
    }
  };

  Field2D hre[2], him[2];
  dz(cd.hzz_re, cd.hzz_im, hre, him);
  Field2D zero(nt, ntau);
  Field2D rre[2], rim[2];
  dz(cd.rho, zero, rre, rim);

  Stat s2;
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < ntau; ++j) {
      const std::complex<double> hzz(cd.hzz_re.at(i, j), cd.hzz_im.at(i, j));
      const std::complex<double> dzh(hre[0].at(i, j), him[0].at(i, j));
      const std::complex<double> dzbh(hre[1].at(i, j), him[1].at(i, j));
      const std::complex<double> dzrho(rre[0].at(i, j), rim[0].at(i, j));
      const double em2 = 1.0 / e2rho.at(i, j);
      const double s = em2 * std::abs(hzz);
      const double chi = eval_psi(spec, s).chi;
      const std::complex<double> hbb = std::conj(hzz);
      const std::complex<double> rhs =
          0.5 * chi * em2 *
          (hbb * dzh + std::conj(hbb * dzbh) - 4.0 * dzrho * std::norm(hzz));
      s2.add(std::abs(dzbh - rhs), i, j);
    }
  s2.fill(out[2]);
  return out;
}

}  // namespace wlab
