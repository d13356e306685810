#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wlab/grid.hpp"
#include "wlab/psi.hpp"

namespace wlab {

// Rotationally symmetric construction.  The quotient of the unit sphere by
// the rotation in the (x1, x2) plane is a round hemisphere with metric
// du^2 + sin^2(u) dv^2, u in (0, pi/2); the orbit through (u, v) is a circle
// of radius w = cos(u).  A unit-speed profile (u(s), v(s)) with heading om
// (u' = cos om, v' = sin om / sin u) lifts to the torus
//   F(t, s) = (cos u cos t, cos u sin t, sin u cos v, sin u sin v)
// with principal curvatures
//   lambda_orbit = tan(u) sin(om),
//   lambda_profile = -om' - cot(u) sin(om),
// and the relation fixes om' once lambda_profile is solved from lambda_orbit.

struct ProductTorus {
  double r = 0.0;        // orbit radius, p = sqrt(1 - r^2)
  double lambda1 = 0.0;  // orbit curvature p / r
  double lambda2 = 0.0;  // profile curvature -r / p
};

// Bisection for the orbit radius r in (0, 1/sqrt(2)) with
// (1 - 2 r^2)/(r p) = psi(1/(r p)); throws NoRoot when no sign change exists.
ProductTorus product_torus(const PsiSpec& spec, double tol = 1e-13);

TorusGrid make_product_grid(double r, std::size_t n_t, std::size_t n_th);

// Unique root x of x + lambda_orbit = psi(|x - lambda_orbit|); the defect is
// strictly increasing in x, solved by safeguarded Newton.
double solve_vertical_curvature(const PsiSpec& spec, double lambda_orbit,
                                double tol = 1e-13);

// Constant-profile value: the u with lambda_profile(u) = -cot(u).
double equilibrium_u(const PsiSpec& spec);

// Small-amplitude limit of the v advance per half oscillation,
// pi / sqrt(1 + (beta1/beta2) tan^2 u*).
double limit_dv(const PsiSpec& spec);

struct ProfileState {
  double u = 0.0, v = 0.0, om = 0.0;
};

struct HalfOscillation {
  double s_half = 0.0;  // arc length to the next turning point
  double dv = 0.0;      // v advance over it
  double u_end = 0.0;   // turning value reached
};

// One half oscillation starting at the turning point (u0, v = 0, om = pi/2).
// Turning points are transversal zero crossings of cos(om); the first one is
// located by bisection in arc length.  Optionally records the fixed-step
// trajectory samples.
HalfOscillation integrate_profile(const PsiSpec& spec, double u0,
                                  double step = 1e-3,
                                  std::vector<ProfileState>* trace = nullptr);

// Max deviation of turning values from exact two-point alternation over
// n_half consecutive half oscillations.
double turning_drift(const PsiSpec& spec, double u0, int n_half,
                     double step = 1e-3);

struct ClosureCandidate {
  long long p = 0, q = 0;
  double u_lo = 0.0, u_hi = 0.0;  // bracketing start values
};

struct ClosureScan {
  double u_lo = 0.0, u_hi = 0.0;
  std::vector<double> u0;  // sampled start values (turning points)
  std::vector<double> dv;  // attained v advance per half oscillation
  std::vector<ClosureCandidate> candidates;  // dv crosses pi p / q inside
};

ClosureScan scan_closures(const PsiSpec& spec, double u_lo = 0.0,
                          double u_hi = 0.0, std::size_t n_samples = 33,
                          long long q_max = 8, double step = 1e-3);

struct ProfileCurve {
  double u0 = 0.0;
  double s_half = 0.0;
  double dv_half = 0.0;
  long long p = 0, q = 0;  // closure 2 q dv_half = 2 pi p
  double length = 0.0;     // total arc length 2 q s_half
  double step = 0.0;
  double closure_residual = 0.0;
  bool simple = true;  // no self-intersection found by the segment sweep
  // Uniform arc-length samples, s[k] = length * k / M.
  std::vector<double> s, u, v, du, dv, lam_profile, lam_orbit;
};

// Solves dv_half(u0) = pi p / q for u0 inside [u_lo, u_hi] (sign change
// required, else NotFound), then integrates the closed curve.
ProfileCurve close_profile(const PsiSpec& spec, long long p, long long q,
                           double u_lo, double u_hi, double step = 1e-3,
                           std::size_t n_samples = 4096);

TorusGrid emit_grid(const ProfileCurve& pc, std::size_t n_t, std::size_t n_th);
TorusGrid emit_product_grid(const PsiSpec& spec, const ProductTorus& pt,
                            std::size_t n_t, std::size_t n_th);

void save_profile_csv(const ProfileCurve& pc, const std::string& path);

}  // namespace wlab
