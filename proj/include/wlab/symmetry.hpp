#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wlab/grid.hpp"
#include "wlab/identities.hpp"
#include "wlab/psi.hpp"
#include "wlab/surface.hpp"
#include "wlab/vec4.hpp"

namespace wlab {

// Integrating factor phi with phi'(s) = -(1 + psi'(s)) / (2 s) phi(s) and
// phi(s_ref) = 1, tabulated on [s_lo, s_hi].  s_ref is a table node, so the
// normalization holds exactly; between nodes evaluation is cubic Hermite
// using the ODE slope, matching the order-4 integration.
struct PhiTable {
  double s_lo = 0.0, s_hi = 0.0, s_ref = 0.0;
  std::vector<double> s, phi, dphi;

  double eval(double x) const;  // RangeError outside [s_lo, s_hi]
};

PhiTable solve_phi(const PsiSpec& spec, double s_lo, double s_hi,
                   double s_ref);

// max over the grid of |D_1 lambda_1| and |D_1 lambda_2|: the curvatures
// must be constant along the lambda_1 curvature lines.
ResidualSummary curvature_line_constancy(const CurvatureField& cf);

// V(x) = phi(lambda_1(x) - lambda_2(x)) e_1(x).
std::vector<Vec4> build_killing(const CurvatureField& cf,
                                const PhiTable& phi);

struct SymmetryFit {
  std::array<std::array<double, 4>, 4> Q{};  // anti-symmetric by construction
  std::array<double, 4> singular_values{};   // descending
  double fit_residual = 0.0;   // sqrt(sum |QF - V|^2 / sum |V|^2)
  double condition = 0.0;      // of the 6x6 normal equations
  bool rank2 = false;
  double tangency_nu = 0.0;    // max |<QF, nu>|, 0 when no field is supplied
  double tangency_F = 0.0;     // max |<QF, F>|
  // Filled by the verification driver from the companion checks.
  double lie_g_residual = 0.0, lie_h_residual = 0.0;
  double d1_lambda_residual = 0.0;
  std::vector<double> phi_s, phi_vals;  // tabulation echo for the report
};

// Least squares over all grid points for the six free entries of an
// anti-symmetric Q minimizing sum |Q F(x) - V(x)|^2.  The optional field
// supplies the normal for the tangency residual.  Throws IllConditioned
// when the normal equations' condition number exceeds 1e12.
SymmetryFit fit_Q(const TorusGrid& grid, const std::vector<Vec4>& V,
                  const CurvatureField* cf = nullptr);

// Full coordinate Lie derivatives: with V = V^c d_c tangent,
//   (L_V g)_ab = V^c d_c g_ab + g_cb d_a V^c + g_ac d_b V^c
// and the same with h.  Expressing L_V g through derivatives of normalized
// frame components would vanish identically by construction; the coordinate
// form below is the falsifiable statement.  Returns the two grid maxima
// (metric, second form).
std::pair<double, double> lie_derivative_residuals(
    const CurvatureField& cf, const std::vector<Vec4>& V);

}  // namespace wlab
