#pragma once

// Shared fixtures: the (1, 0.5, 0) family and its three constructed tori.
// Everything is cached per resolution since analyze() at 256^2 is the
// dominant cost of several test binaries.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>

#include "wlab/psi.hpp"
#include "wlab/rotational.hpp"
#include "wlab/surface.hpp"
#include "wlab/symmetry.hpp"

namespace wt {

using namespace wlab;

inline const PsiSpec& spec1050() {
  static PsiSpec s = PsiSpec::sqrt_family(1.0, 0.5, 0.0);
  return s;
}

inline const ProductTorus& product1050() {
  static ProductTorus pt = product_torus(spec1050());
  return pt;
}

// Self-intersecting 3/5 closure: smooth identity/convergence example and the
// negative control for the embedded two-point checks.
inline const ProfileCurve& und35() {
  static ProfileCurve pc = close_profile(spec1050(), 3, 5, 1.3116, 1.3594);
  return pc;
}

// Embedded 1/2 lower-branch closure: the two-point and symmetry example.
inline const ProfileCurve& neck12() {
  static ProfileCurve pc = close_profile(spec1050(), 1, 2, 0.7376, 0.7854);
  return pc;
}

inline const TorusGrid& product_grid(std::size_t n) {
  static std::map<std::size_t, TorusGrid> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, make_product_grid(product1050().r, n, n)).first;
  return it->second;
}

inline const TorusGrid& und35_grid(std::size_t n) {
  static std::map<std::size_t, TorusGrid> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, emit_grid(und35(), n, n)).first;
  return it->second;
}

inline const TorusGrid& neck12_grid(std::size_t n) {
  static std::map<std::size_t, TorusGrid> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, emit_grid(neck12(), n, n)).first;
  return it->second;
}

inline const CurvatureField& analyzed(const TorusGrid& g) {
  static std::map<const TorusGrid*, CurvatureField> cache;
  auto it = cache.find(&g);
  if (it == cache.end())
    it = cache.emplace(&g, analyze(g, DiffScheme::Spectral, &spec1050())).first;
  return it->second;
}

inline const CurvatureField& product_cf(std::size_t n) {
  return analyzed(product_grid(n));
}
inline const CurvatureField& und35_cf(std::size_t n) {
  return analyzed(und35_grid(n));
}
inline const CurvatureField& neck12_cf(std::size_t n) {
  return analyzed(neck12_grid(n));
}

// Integrating-factor table covering the spread range of a field, with the
// same margins and midpoint reference the verification driver uses.
inline PhiTable phi_for(const CurvatureField& cf, const PsiSpec& spec) {
  double lo = cf.lam1.a[0] - cf.lam2.a[0], hi = lo;
  for (std::size_t p = 1; p < cf.lam1.size(); ++p) {
    double s = cf.lam1.a[p] - cf.lam2.a[p];
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  lo *= 1.0 - 1e-6;
  hi *= 1.0 + 1e-6;
  return solve_phi(spec, lo, hi, 0.5 * (lo + hi));
}

using Mat4 = std::array<std::array<double, 4>, 4>;

// Fixed generic ambient rotation: plane rotations in (0,1), (2,3), (0,2).
inline const Mat4& ambient_rotation() {
  static Mat4 R = [] {
    auto plane = [](int p, int q, double ang) {
      Mat4 m{};
      for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
      m[p][p] = std::cos(ang);
      m[q][q] = std::cos(ang);
      m[p][q] = -std::sin(ang);
      m[q][p] = std::sin(ang);
      return m;
    };
    auto mul = [](const Mat4& a, const Mat4& b) {
      Mat4 c{};
      for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
          for (int j = 0; j < 4; ++j) c[i][j] += a[i][k] * b[k][j];
      return c;
    };
    return mul(mul(plane(0, 1, 0.7), plane(2, 3, 0.4)), plane(0, 2, 0.3));
  }();
  return R;
}

inline TorusGrid rotated(const TorusGrid& g, const Mat4& R) {
  TorusGrid out = g;
  for (auto& p : out.points) {
    Vec4 q{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) q[i] += R[i][j] * p[j];
    p = q;
  }
  return out;
}

}  // namespace wt
