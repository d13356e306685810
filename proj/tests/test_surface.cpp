#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "wlab/errors.hpp"
#include "wlab/surface.hpp"
#include "wlab/vec4.hpp"

using namespace wlab;

TEST_CASE("clifford torus curvatures are plus and minus one") {
  TorusGrid g = make_product_grid(1.0 / std::sqrt(2.0), 64, 64);
  CurvatureField cf = analyze(g);
  double worst1 = 0.0, worst2 = 0.0;
  for (std::size_t k = 0; k < cf.lam1.a.size(); ++k) {
    worst1 = std::max(worst1, std::abs(cf.lam1.a[k] - 1.0));
    worst2 = std::max(worst2, std::abs(cf.lam2.a[k] + 1.0));
  }
  CHECK(worst1 < 1e-10);
  CHECK(worst2 < 1e-10);
  CHECK(std::abs(cf.min_spread - 2.0) < 1e-10);
}

TEST_CASE("product torus analysis reproduces the closed-form curvatures") {
  const ProductTorus& pt = wt::product1050();
  const CurvatureField& cf = wt::product_cf(64);
  double worst = 0.0;
  for (std::size_t k = 0; k < cf.lam1.a.size(); ++k) {
    worst = std::max(worst, std::abs(cf.lam1.a[k] - pt.lambda1));
    worst = std::max(worst, std::abs(cf.lam2.a[k] - pt.lambda2));
  }
  CHECK(worst < 1e-11);
  CHECK(cf.has_beta);
  CHECK(cf.frames_ok);
}

TEST_CASE("frames are orthonormal and the normal is tangent to the sphere") {
  const TorusGrid& g = wt::und35_grid(64);
  const CurvatureField& cf = wt::und35_cf(64);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_t; ++i)
    for (std::size_t j = 0; j < g.n_th; ++j) {
      const Vec4& nu = cf.nu_at(i, j);
      const Vec4& F = g.at(i, j);
      worst = std::max(worst, std::abs(dot(nu, nu) - 1.0));
      worst = std::max(worst, std::abs(dot(nu, F)));
      // g-orthonormality of the principal frame.
      const double e11 = cf.e1c1.at(i, j), e12 = cf.e1c2.at(i, j);
      const double e21 = cf.e2c1.at(i, j), e22 = cf.e2c2.at(i, j);
      const double g11 = cf.g11.at(i, j), g12 = cf.g12.at(i, j),
                   g22 = cf.g22.at(i, j);
      const double n1 = g11 * e11 * e11 + 2 * g12 * e11 * e12 + g22 * e12 * e12;
      const double n2 = g11 * e21 * e21 + 2 * g12 * e21 * e22 + g22 * e22 * e22;
      const double cross =
          g11 * e11 * e21 + g12 * (e11 * e22 + e12 * e21) + g22 * e12 * e22;
      worst = std::max({worst, std::abs(n1 - 1.0), std::abs(n2 - 1.0),
                        std::abs(cross)});
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("mean curvature orientation makes the trace positive") {
  for (std::size_t n : {32ul, 64ul}) {
    const CurvatureField& cf = wt::product_cf(n);
    for (std::size_t k = 0; k < cf.lam1.a.size(); ++k) {
      CHECK(cf.lam1.a[k] + cf.lam2.a[k] > 0.0);
      CHECK(cf.lam1.a[k] >= cf.lam2.a[k]);
    }
    break;  // one resolution is enough for the sign property
  }
}

TEST_CASE("second fundamental form agrees with the normal-derivative route") {
  const CurvatureField& cf = wt::und35_cf(128);
  SecondFormCheck sf = second_form_via_normal(cf);
  double worst = 0.0;
  for (std::size_t k = 0; k < cf.h11.a.size(); ++k) {
    worst = std::max(worst, std::abs(sf.h11.a[k] - cf.h11.a[k]));
    worst = std::max(worst, std::abs(sf.h22.a[k] - cf.h22.a[k]));
    worst = std::max(worst, std::abs(sf.h12.a[k] - cf.h12.a[k]));
    worst = std::max(worst, std::abs(sf.h21.a[k] - sf.h12.a[k]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("umbilic diagnostics report spread and trivial windings") {
  const CurvatureField& cf = wt::product_cf(64);
  UmbilicDiagnostics ud = umbilic_diagnostics(cf);
  CHECK(ud.min_spread ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  CHECK(ud.winding_t == doctest::Approx(0.0));
  CHECK(ud.winding_th == doctest::Approx(0.0));
}

TEST_CASE("directional derivatives vanish on constants and split on products") {
  const CurvatureField& cf = wt::product_cf(32);
  Field2D f(cf.n_t, cf.n_th);
  for (std::size_t i = 0; i < cf.n_t; ++i)
    for (std::size_t j = 0; j < cf.n_th; ++j) f.at(i, j) = 3.5;
  Field2D d1f, d2f;
  directional_derivs(cf, f, d1f, d2f);
  double worst = 0.0;
  for (double v : d1f.a) worst = std::max(worst, std::abs(v));
  for (double v : d2f.a) worst = std::max(worst, std::abs(v));
  CHECK(worst < 1e-12);
}

TEST_CASE("degenerate immersions are rejected") {
  TorusGrid g = wt::product_grid(32);
  for (std::size_t j = 0; j < g.n_th; ++j) g.at(1, j) = g.at(0, j);
  CHECK_THROWS_AS(analyze(g), Error);
}

TEST_CASE("frame-dependent checks refuse fields without frames") {
  CurvatureField cf = wt::product_cf(32);  // copy
  cf.frames_ok = false;
  CHECK_THROWS_AS(require_frames(cf), Error);
}

TEST_CASE("conformal data matches the metric of a rotational grid") {
  const TorusGrid& g = wt::und35_grid(64);
  const CurvatureField& cf = wt::und35_cf(64);
  ConformalData cd = conformal_data(g, cf);
  CHECK(cd.n_t == g.n_t);
  CHECK(cd.T > 0.0);
  CHECK(cd.c > 0.0);
  // w and rho are consistent: rho = log(w/2).
  double worst = 0.0;
  for (std::size_t j = 0; j < cd.n_tau; ++j)
    worst = std::max(worst, std::abs(cd.rho.at(0, j) -
                                     std::log(cd.w_tau[j] / 2.0)));
  CHECK(worst < 1e-12);
}

TEST_CASE("non-rotational grids are refused by the conformal gate") {
  TorusGrid g = wt::product_grid(32);
  // Twist th by one full turn per t loop: same surface, same periodicity,
  // but the induced metric acquires an order-one g12 component.
  for (std::size_t i = 0; i < g.n_t; ++i)
    for (std::size_t j = 0; j < g.n_th; ++j) {
      const double r = wt::product1050().r;
      const double rho = std::sqrt(1.0 - r * r);
      const double t = 2.0 * M_PI * i / g.n_t;
      const double th = 2.0 * M_PI * j / g.n_th + t;
      g.at(i, j) = Vec4{{r * std::cos(t), r * std::sin(t),
                        rho * std::cos(th), rho * std::sin(th)}};
    }
  CurvatureField cf = analyze(g, DiffScheme::Spectral, &wt::spec1050());
  CHECK_THROWS_AS(conformal_data(g, cf), Error);
}
