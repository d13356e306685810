#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wlab {

// Curvature relation psi: the surfaces we build satisfy
//   lambda1 + lambda2 = psi(lambda1 - lambda2)
// with psi even, so only s >= 0 is ever evaluated.  SqrtFamily is
// psi(s) = sqrt(a + b s^2) + c; Tabulated interpolates a user table.
struct PsiSpec {
  enum class Kind { SqrtFamily, Tabulated };
  Kind kind = Kind::SqrtFamily;

  // SqrtFamily parameters.
  double a = 1.0, b = 0.0, c = 0.0;

  // Tabulated data, strictly increasing s >= 0.
  std::vector<double> ts, tpsi, tdpsi, tddpsi;
  std::string table_path;

  static PsiSpec sqrt_family(double a, double b, double c);
  static PsiSpec tabulated(std::vector<double> s, std::vector<double> psi,
                           std::vector<double> dpsi, std::vector<double> ddpsi);
  static PsiSpec tabulated_from_csv(const std::string& path);

  double s_min() const;  // evaluable range
  double s_max() const;  // +inf for SqrtFamily
};

struct PsiEval {
  double psi = 0.0;
  double dpsi = 0.0;
  double ddpsi = 0.0;
  double chi = 0.0;  // dpsi(s)/s, continued through s = 0 by ddpsi(0)
};

PsiEval eval_psi(const PsiSpec& spec, double s);

// Pointwise admissibility conditions checked on a grid that is uniform on
// [s_max/n, s_max] plus a geometric tail accumulating at zero:
//   (a)  s psi'(s) < min{psi(s), s}   (strict; margin must stay positive)
//   (b)  s psi'(s) >= 0
//   (c)  s psi''(s) >= 0
//   (d)  s psi''(s) <= 1 - psi'(s)^2
struct StructureReport {
  bool pass = false;
  double margin_a = 0.0, margin_b = 0.0, margin_c = 0.0, margin_d = 0.0;
  double worst_s_a = 0.0, worst_s_b = 0.0, worst_s_c = 0.0, worst_s_d = 0.0;
  double s_max = 0.0;
  std::size_t n_samples = 0;
};

StructureReport check_structure(const PsiSpec& spec, double s_max,
                                std::size_t n = 10000);

struct BetaPair {
  double b1 = 0.0;  // 1 - psi'(s)
  double b2 = 0.0;  // 1 + psi'(s)
};

// Throws StructureViolation when psi'(s) >= 1, where b1 would lose positivity.
BetaPair beta_coeffs(const PsiSpec& spec, double s);

}  // namespace wlab
