#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>

#include "helpers.hpp"
#include "wlab/errors.hpp"
#include "wlab/identities.hpp"
#include "wlab/rotational.hpp"

using namespace wlab;

TEST_CASE("product torus radius solves the quartic in closed form") {
  // (1 - 2y)^2 = y(1 - y) + 1/2 with y = r^2 gives y = (5 - sqrt(15)) / 10.
  const double y = (5.0 - std::sqrt(15.0)) / 10.0;
  const ProductTorus& pt = wt::product1050();
  CHECK(std::abs(pt.r - std::sqrt(y)) < 1e-12);
  CHECK(std::abs(pt.r - 0.335711) < 1e-6);
  const double rho = std::sqrt(1.0 - pt.r * pt.r);
  CHECK(pt.lambda1 == doctest::Approx(rho / pt.r).epsilon(1e-14));
  CHECK(pt.lambda2 == doctest::Approx(-pt.r / rho).epsilon(1e-14));
  // Spread and sum collapse to sqrt(10) and sqrt(6).
  CHECK(pt.lambda1 - pt.lambda2 == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
  CHECK(pt.lambda1 + pt.lambda2 == doctest::Approx(std::sqrt(6.0)).epsilon(1e-13));
}

TEST_CASE("constant psi families have closed-form product radii") {
  // psi = 2: (1 - 2r^2)/(r rho) = 2 gives r^2 = (2 - sqrt(2))/4.
  ProductTorus p4 = product_torus(PsiSpec::sqrt_family(4, 0, 0));
  CHECK(std::abs(p4.r * p4.r - (2.0 - std::sqrt(2.0)) / 4.0) < 1e-12);
  // psi = 0 (the clifford torus) sits outside the family: c must stay
  // nonnegative, so that route is refused up front.
  CHECK_THROWS_AS(PsiSpec::sqrt_family(1, 0, -1), Error);
}

TEST_CASE("no product torus exists for the b = 1 family") {
  CHECK_THROWS_AS(product_torus(PsiSpec::sqrt_family(1, 1, 0)), Error);
}

TEST_CASE("vertical curvature root matches the product balance") {
  const PsiSpec& spec = wt::spec1050();
  const ProductTorus& pt = wt::product1050();
  // At the product torus the orbit curvature determines the profile one.
  const double x = solve_vertical_curvature(spec, pt.lambda1);
  CHECK(std::abs(x - pt.lambda2) < 1e-11);
  // The defect is monotone: a different orbit curvature gives a unique root.
  const double x2 = solve_vertical_curvature(spec, 2.0);
  CHECK(x2 + 2.0 == doctest::Approx(eval_psi(spec, std::abs(x2 - 2.0)).psi)
                        .epsilon(1e-12));
}

TEST_CASE("equilibrium profile height matches the product radius") {
  CHECK(std::abs(equilibrium_u(wt::spec1050()) -
                 std::acos(wt::product1050().r)) < 1e-10);
}

TEST_CASE("small oscillations approach the linearized v advance") {
  const PsiSpec& spec = wt::spec1050();
  const double dv_lim = limit_dv(spec);
  CHECK(dv_lim == doctest::Approx(1.913280363993).epsilon(1e-9));
  const double u_star = equilibrium_u(spec);
  HalfOscillation h = integrate_profile(spec, u_star - 1e-4);
  CHECK(std::abs(h.dv - dv_lim) < 1e-6);
  // Turning values alternate two-point: u_end returns near u0's partner.
  CHECK(h.u_end > u_star);
}

TEST_CASE("profile integration is step-size converged") {
  const PsiSpec& spec = wt::spec1050();
  for (double u0 : {0.75, 1.30}) {
    HalfOscillation a = integrate_profile(spec, u0, 1e-3);
    HalfOscillation b = integrate_profile(spec, u0, 2e-4);
    CHECK(std::abs(a.dv - b.dv) < 1e-8);
    CHECK(std::abs(a.s_half - b.s_half) < 1e-8);
  }
  CHECK(turning_drift(spec, 0.8, 8) < 1e-8);
}

TEST_CASE("closure scan brackets the known rational windings") {
  ClosureScan sc = scan_closures(wt::spec1050());
  bool found12 = false, found35 = false;
  for (const ClosureCandidate& c : sc.candidates) {
    if (c.p == 1 && c.q == 2) found12 = true;
    if (c.p == 3 && c.q == 5) found35 = true;
  }
  CHECK(found12);
  CHECK(found35);
}

TEST_CASE("the 1/2 closure is embedded and the 3/5 closure is not") {
  const ProfileCurve& n12 = wt::neck12();
  CHECK(n12.u0 == doctest::Approx(0.76707009374114232).epsilon(1e-9));
  CHECK(n12.closure_residual < 1e-8);
  CHECK(n12.simple);
  CHECK(std::abs(n12.dv_half - M_PI / 2.0) < 1e-10);

  const ProfileCurve& u35 = wt::und35();
  CHECK(u35.u0 == doctest::Approx(1.3459885).epsilon(1e-6));
  CHECK(u35.closure_residual < 1e-8);
  CHECK_FALSE(u35.simple);
  CHECK(std::abs(u35.dv_half - 3.0 * M_PI / 5.0) < 1e-10);
}

TEST_CASE("failed closure searches report the attained range") {
  // In [1.30, 1.33] the v advance stays near 1.89, far from pi/2.
  try {
    close_profile(wt::spec1050(), 1, 2, 1.30, 1.33);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
    CHECK(std::string(e.what()).find("dv") != std::string::npos);
  }
}

TEST_CASE("emitted product grids satisfy the curvature relation tightly") {
  const TorusGrid& g = wt::product_grid(64);
  g.validate();
  CHECK(g.provenance == "product");
  ResidualSummary r = weingarten_residual(wt::product_cf(64), wt::spec1050());
  CHECK(r.max_abs < 1e-10);
}

TEST_CASE("emitted profile grids satisfy the curvature relation under refinement") {
  ResidualSummary r128 = weingarten_residual(wt::und35_cf(128), wt::spec1050());
  CHECK(r128.pass);
  CHECK(r128.max_abs < 1e-8);
  // The closed curve's endpoints match: grid wraps without a seam.
  const TorusGrid& g = wt::und35_grid(64);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_t; ++i) {
    const Vec4 d = g.at(i, 0) - g.at(i, g.n_th - 1);
    worst = std::max(worst, norm(d));
  }
  CHECK(worst < 1.0);  // adjacent, not identical: n_th - 1 is one step back
}

TEST_CASE("profile csv export writes the sampled curve") {
  const ProfileCurve& pc = wt::neck12();
  const std::string path = "neck12_profile_test.csv";
  save_profile_csv(pc, path);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char line[256];
  std::size_t rows = 0;
  while (std::fgets(line, sizeof line, f)) ++rows;
  std::fclose(f);
  CHECK(rows == pc.s.size() + 1);  // header plus samples
  std::remove(path.c_str());
}

TEST_CASE("grid emission rejects degenerate sizes") {
  CHECK_THROWS_AS(make_product_grid(0.5, 0, 16), Error);
  CHECK_THROWS_AS(emit_grid(wt::neck12(), 16, 0), Error);
}
