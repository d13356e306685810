#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wlab/field2d.hpp"
#include "wlab/psi.hpp"
#include "wlab/surface.hpp"

namespace wlab {

// Outcome of one pointwise identity check.  For inequality scans max_abs
// holds the signed maximum and the tolerance is negative, so the invariant
// pass == (max_abs <= tolerance) covers both kinds.
struct ResidualSummary {
  std::string name;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::size_t arg_i = 0, arg_j = 0;
  double tolerance = 0.0;
  bool pass = false;
  // Optional refinement trace (N, max_abs), filled by refinement drivers.
  std::vector<std::pair<std::size_t, double>> refine;
};

// Largest curvature magnitude on the grid, floored at 1; tolerance formulas
// scale with powers of this so sharp-necked surfaces are judged fairly.
double curvature_scale(const CurvatureField& cf);

// Default pass thresholds at resolution N (the smaller grid dimension),
// all of the form C * scale^p * (128/N)^2 with C documented per check.
double weingarten_tolerance(double scale, std::size_t n);
double gradient_tolerance(double scale, std::size_t n);
double simons_tolerance(double scale, std::size_t n);
double conformal_algebraic_tolerance(double scale, std::size_t n);
double beltrami_tolerance(double scale, std::size_t n);

// max |lambda1 + lambda2 - psi(lambda1 - lambda2)| over the grid.
ResidualSummary weingarten_residual(const CurvatureField& cf, const PsiSpec& spec);

// max over grid and direction k of |beta1 D_k lambda1 + beta2 D_k lambda2|,
// the differentiated form of the curvature relation.
ResidualSummary gradient_constraint_residual(const CurvatureField& cf);

// Residuals of the two second-order eigenvalue identities
//   sum_i beta_i D^2_{ii} lambda_k  + sum_i beta_i (lambda_i^2 - 1) lambda_k
//     - sum_i beta_i lambda_i (lambda_k^2 - 1)
//   = -(-1)^k 2 beta_{3-k} / (lambda1 - lambda2) ((D_1 lambda2)^2 + (D_2 lambda1)^2)
//     + psi''(s) (beta1 + beta2)^2 / beta_k^2 (D_k lambda_{3-k})^2
// for k = 1, 2, with second derivatives taken covariantly in the principal
// frame.
std::pair<ResidualSummary, ResidualSummary> simons_residual(
    const CurvatureField& cf, const PsiSpec& spec);

// Sign scan of the second-order barrier expression for Phi = alpha lambda1 -
// (alpha - 1) lambda2:
//   sum_i beta_i D^2_{ii} Phi - 2 sum_i beta_i / (Phi - lambda_i) (D_i Phi)^2
//     + sum_i beta_i (lambda_i^2 - 1) Phi - sum_i beta_i lambda_i (Phi^2 - 1)
// which must be strictly negative.  lhs.max_abs is the signed maximum and
// lhs.tolerance = -margin with margin = 1e-10 * scale^3.
struct BarrierScan {
  ResidualSummary lhs;
  double alpha = 0.0;
  double min_beta_lambda = 0.0;  // min of beta1 lambda1 + beta2 lambda2 (> 0)
};
BarrierScan barrier_scan(const CurvatureField& cf, const PsiSpec& spec,
                         double alpha);

// Conformal-gauge checks on a rotational grid: the trace identity
// h_{z zbar} = e^{2 rho} (lambda1 + lambda2), the Hopf modulus identity
// |h_zz| = e^{2 rho} (lambda1 - lambda2), and the Beltrami-type equation
// for h_zz with chi(s) = psi'(s)/s.
std::vector<ResidualSummary> conformal_residuals(const ConformalData& cd,
                                                 const CurvatureField& cf,
                                                 const PsiSpec& spec);

}  // namespace wlab
