#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wlab/field2d.hpp"
#include "wlab/grid.hpp"
#include "wlab/psi.hpp"
#include "wlab/spectral.hpp"
#include "wlab/vec4.hpp"

namespace wlab {

// Pointwise curvature data of an immersed torus in the unit sphere.
// Conventions:
//   - coordinate index 1 is the t axis (grid axis 0), index 2 the th axis;
//   - the normal is oriented so that lambda1 + lambda2 > 0 on the grid;
//   - lambda1 >= lambda2, e1/e2 are the g-unit principal directions, with the
//     e1 sign seeded at (0,0) toward positive t and propagated row-major, and
//     (e1, e2) positively oriented with respect to the coordinates.
struct CurvatureField {
  std::size_t n_t = 0, n_th = 0;
  DiffScheme scheme = DiffScheme::Spectral;
  bool has_beta = false;
  bool frames_ok = true;  // false when an umbilic point degenerate frame exists
  double min_spread = 0.0;
  std::size_t spread_i = 0, spread_j = 0;

  Field2D g11, g12, g22, detg;
  Field2D h11, h12, h22;
  std::vector<Vec4> nu, e1, e2;
  Field2D lam1, lam2;
  Field2D beta1, beta2;                // 1 -+ psi'(lambda1 - lambda2)
  Field2D e1c1, e1c2, e2c1, e2c2;      // coordinate components of e1, e2
  Field2D d1l1, d2l1, d1l2, d2l2;      // D_k lambda_i along e_k
  // Christoffel symbols Gamma^c_{ab}: first index c-1, second 0:(11) 1:(12) 2:(22).
  std::array<std::array<Field2D, 3>, 2> gam;

  DiffMatrices dm_t, dm_th;
  std::array<Field2D, 4> comp;         // point components as fields
  std::array<Field2D, 4> Ft, Fth;      // first derivatives of the immersion

  const Vec4& nu_at(std::size_t i, std::size_t j) const { return nu[i * n_th + j]; }
  const Vec4& e1_at(std::size_t i, std::size_t j) const { return e1[i * n_th + j]; }
  const Vec4& e2_at(std::size_t i, std::size_t j) const { return e2[i * n_th + j]; }
};

CurvatureField analyze(const TorusGrid& grid, DiffScheme scheme = DiffScheme::Spectral,
                       const PsiSpec* psi = nullptr);

// Throws UmbilicDegeneracy when principal frames are not defined everywhere.
void require_frames(const CurvatureField& cf);

// Directional derivatives D_1 f, D_2 f along the principal frame.
void directional_derivs(const CurvatureField& cf, const Field2D& f, Field2D& d1f,
                        Field2D& d2f);

// Diagonal second covariant derivatives (Hess f)(e_k, e_k), computed as
// e^a e^b (d_a d_b f - Gamma^c_{ab} d_c f).
void covariant_hessian_diag(const CurvatureField& cf, const Field2D& f,
                            Field2D& ddf1, Field2D& ddf2);

// Independent route to the second fundamental form via -<d_a nu, d_b F>,
// used to cross-check the <dd F, nu> route.
struct SecondFormCheck {
  Field2D h11, h12, h21, h22;
};
SecondFormCheck second_form_via_normal(const CurvatureField& cf);

struct UmbilicDiagnostics {
  double min_spread = 0.0;
  // Winding numbers of the doubled principal direction field along the two
  // coordinate loops; NaN when min_spread < 1e-8.
  double winding_t = 0.0, winding_th = 0.0;
};
UmbilicDiagnostics umbilic_diagnostics(const CurvatureField& cf);

// Conformal description of a rotational grid.  The profile parameter th is
// reparametrized by tau with d tau = (c / w) d th, where w is the orbit radius
// and c = |F_th|; in the coordinate z = tau + i t the metric is
// w^2 (d tau^2 + d t^2) = 4 e^{2 rho} |dz|^2.  Fields live on the
// (t, tau-hat) grid with tau-hat = 2 pi tau / T uniform along axis 1.
struct ConformalData {
  std::size_t n_t = 0, n_tau = 0;
  double T = 0.0;      // total tau period
  double c = 0.0;      // |F_th| (constant along the profile)
  std::vector<double> w_tau;   // orbit radius at the tau nodes
  Field2D rho;                 // log(w / 2)
  Field2D hzz_re, hzz_im;      // h_zz = (h_tautau - h_tt - 2 i h_taut) / 4
  Field2D hzzb;                // h_{z zbar} = (h_tautau + h_tt) / 4
  Field2D lam1, lam2;
};

ConformalData conformal_data(const TorusGrid& grid, const CurvatureField& cf,
                             std::size_t n_tau = 0);

}  // namespace wlab
