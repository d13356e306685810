#include "wlab/spectral.hpp"

#include <cmath>
#include <numbers>

#include "wlab/errors.hpp"
#include "wlab/kernels.hpp"

namespace wlab {

namespace {

constexpr double kPi = std::numbers::pi;

void build_spectral(DiffMatrices& dm) {
  const std::size_t n = dm.n;
  const double h = 2.0 * kPi / static_cast<double>(n);
  auto sgn = [](std::ptrdiff_t m) { return (m % 2 == 0) ? 1.0 : -1.0; };
  if (n % 2 == 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::ptrdiff_t m =
            static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
        if (m == 0) {
          dm.d1[i * n + j] = 0.0;
          dm.d2[i * n + j] = -kPi * kPi / (3.0 * h * h) - 1.0 / 6.0;
        } else {
          const double t = 0.5 * h * static_cast<double>(m);
          dm.d1[i * n + j] = 0.5 * sgn(m) / std::tan(t);
          const double s = std::sin(t);
          dm.d2[i * n + j] = -0.5 * sgn(m) / (s * s);
        }
      }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::ptrdiff_t m =
            static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
        dm.d1[i * n + j] =
            m == 0 ? 0.0 : 0.5 * sgn(m) / std::sin(0.5 * h * static_cast<double>(m));
      }
    // For odd n the square of the first-derivative matrix is still exact on
    // the resolvable trigonometric polynomials.
    kernels::apply_dmat_scalar(dm.d1.data(), dm.d1.data(), dm.d2.data(), n, n, n);
  }
}

void build_fd4(DiffMatrices& dm) {
  const std::size_t n = dm.n;
  if (n < 5) raise(ErrorCode::BadInput, "fd4 scheme needs n >= 5");
  const double h = 2.0 * kPi / static_cast<double>(n);
  auto wrap = [n](std::ptrdiff_t i) {
    i %= static_cast<std::ptrdiff_t>(n);
    if (i < 0) i += static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(i);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::ptrdiff_t is = static_cast<std::ptrdiff_t>(i);
    double* r1 = dm.d1.data() + i * n;
    double* r2 = dm.d2.data() + i * n;
    r1[wrap(is - 2)] += 1.0 / (12.0 * h);
    r1[wrap(is - 1)] += -8.0 / (12.0 * h);
    r1[wrap(is + 1)] += 8.0 / (12.0 * h);
    r1[wrap(is + 2)] += -1.0 / (12.0 * h);
    r2[wrap(is - 2)] += -1.0 / (12.0 * h * h);
    r2[wrap(is - 1)] += 16.0 / (12.0 * h * h);
    r2[wrap(is)] += -30.0 / (12.0 * h * h);
    r2[wrap(is + 1)] += 16.0 / (12.0 * h * h);
    r2[wrap(is + 2)] += -1.0 / (12.0 * h * h);
  }
}

}  // namespace

DiffMatrices build_diff(std::size_t n, DiffScheme scheme) {
  if (n < 4) raise(ErrorCode::BadInput, "differentiation needs n >= 4");
  DiffMatrices dm;
  dm.n = n;
  dm.scheme = scheme;
  dm.d1.assign(n * n, 0.0);
  dm.d2.assign(n * n, 0.0);
  if (scheme == DiffScheme::Spectral)
    build_spectral(dm);
  else
    build_fd4(dm);
  return dm;
}

Field2D diff_axis(const DiffMatrices& dm, const Field2D& f, int axis, int order) {
  if (order != 1 && order != 2) raise(ErrorCode::BadInput, "derivative order must be 1 or 2");
  const std::vector<double>& D = order == 1 ? dm.d1 : dm.d2;
  if (axis == 0) {
    if (dm.n != f.n0) raise(ErrorCode::BadInput, "matrix size does not match axis 0");
    Field2D out(f.n0, f.n1);
    kernels::apply_dmat(D.data(), f.a.data(), out.a.data(), f.n0, f.n0, f.n1);
    return out;
  }
  if (axis != 1) raise(ErrorCode::BadInput, "axis must be 0 or 1");
  if (dm.n != f.n1) raise(ErrorCode::BadInput, "matrix size does not match axis 1");
  Field2D ft = transpose(f);
  Field2D outt(f.n1, f.n0);
  kernels::apply_dmat(D.data(), ft.a.data(), outt.a.data(), f.n1, f.n1, f.n0);
  return transpose(outt);
}

namespace {

struct Weight {
  double w, dw;
};

// Periodic cardinal function centered at 0 and its derivative, for n nodes.
Weight cardinal(std::size_t n, double delta) {
  const double nd = static_cast<double>(n);
  double d = std::remainder(delta, 2.0 * kPi);
  if (std::abs(d) < 1e-9) {
    const bool even = (n % 2 == 0);
    const double c = even ? (nd * nd + 2.0) / 24.0 : (nd * nd - 1.0) / 24.0;
    return {1.0 - c * d * d, -2.0 * c * d};
  }
  const double half = 0.5 * d;
  const double sn = std::sin(0.5 * nd * d);
  const double cn = std::cos(0.5 * nd * d);
  if (n % 2 == 0) {
    const double ct = 1.0 / std::tan(half);
    const double s = std::sin(half);
    const double w = sn * ct / nd;
    const double dw = (0.5 * nd * cn * ct - 0.5 * sn / (s * s)) / nd;
    return {w, dw};
  }
  const double s = std::sin(half);
  const double w = sn / (nd * s);
  const double dw = (0.5 * nd * cn * s - 0.5 * std::cos(half) * sn) / (nd * s * s);
  return {w, dw};
}

}  // namespace

double trig_interp(const std::vector<double>& f, double x) {
  const std::size_t n = f.size();
  const double h = 2.0 * kPi / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    acc += f[j] * cardinal(n, x - h * static_cast<double>(j)).w;
  return acc;
}

double trig_interp_deriv(const std::vector<double>& f, double x) {
  const std::size_t n = f.size();
  const double h = 2.0 * kPi / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    acc += f[j] * cardinal(n, x - h * static_cast<double>(j)).dw;
  return acc;
}

double trig_cardinal(std::size_t n, double delta) { return cardinal(n, delta).w; }

double trig_cardinal_deriv(std::size_t n, double delta) {
  return cardinal(n, delta).dw;
}

}  // namespace wlab
