#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <random>
#include <vector>

#include "wlab/errors.hpp"
#include "wlab/kernels.hpp"

using namespace wlab;
namespace k = wlab::kernels;

namespace {

std::mt19937_64 rng(20240817);

std::vector<double> random_vec(std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar apply_dmat is plain row-times-column accumulation") {
  const std::size_t nr = 7, n = 5, nc = 3;
  auto D = random_vec(nr * n);
  auto in = random_vec(n * nc);
  std::vector<double> out(nr * nc, 0.0), ref(nr * nc, 0.0);
  k::apply_dmat_scalar(D.data(), in.data(), out.data(), nr, n, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += D[r * n + j] * in[j * nc + c];
      ref[r * nc + c] = acc;
    }
  CHECK(bitwise_equal(out, ref));
}

TEST_CASE("pair_row scalar matches the z definition term by term") {
  const std::size_t m = 33;
  auto y0 = random_vec(m), y1 = random_vec(m), y2 = random_vec(m),
       y3 = random_vec(m);
  auto fx = random_vec(4), nx = random_vec(4);
  const double phi = 2.25;
  std::vector<double> z(m, 0.0), ref(m, 0.0);
  k::pair_row_scalar(phi, fx.data(), nx.data(), y0.data(), y1.data(), y2.data(),
                     y3.data(), z.data(), m);
  for (std::size_t j = 0; j < m; ++j) {
    // Same left-to-right accumulation as Vec4::dot.
    double df = fx[0] * y0[j];
    df += fx[1] * y1[j];
    df += fx[2] * y2[j];
    df += fx[3] * y3[j];
    double dn = nx[0] * y0[j];
    dn += nx[1] * y1[j];
    dn += nx[2] * y2[j];
    dn += nx[3] * y3[j];
    ref[j] = phi * (1.0 - df) - dn;
  }
  CHECK(bitwise_equal(z, ref));
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels are bit-identical to scalar on awkward sizes") {
  if (!k::avx2_available()) return;
  // Sizes chosen to cover every remainder lane count.
  for (std::size_t n : {1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 13ul, 64ul, 129ul}) {
    auto y0 = random_vec(n), y1 = random_vec(n), y2 = random_vec(n),
         y3 = random_vec(n);
    auto fx = random_vec(4), nx = random_vec(4);
    std::vector<double> zs(n), zv(n);
    k::pair_row_scalar(1.75, fx.data(), nx.data(), y0.data(), y1.data(),
                       y2.data(), y3.data(), zs.data(), n);
    k::pair_row_avx2(1.75, fx.data(), nx.data(), y0.data(), y1.data(),
                     y2.data(), y3.data(), zv.data(), n);
    CHECK(bitwise_equal(zs, zv));

    const std::size_t nr = (n % 3) + 2, nc = (n % 5) + 1;
    auto D = random_vec(nr * n);
    auto in = random_vec(n * nc);
    std::vector<double> os(nr * nc), ov(nr * nc);
    k::apply_dmat_scalar(D.data(), in.data(), os.data(), nr, n, nc);
    k::apply_dmat_avx2(D.data(), in.data(), ov.data(), nr, n, nc);
    CHECK(bitwise_equal(os, ov));
  }
}
#endif

TEST_CASE("dispatch honors set_backend and rejects unavailable ones") {
  const k::Backend initial = k::active_backend();
  CHECK(k::backend_name(initial) != nullptr);

  k::set_backend(k::Backend::Scalar);
  CHECK(k::active_backend() == k::Backend::Scalar);

  const std::size_t n = 40;
  auto y0 = random_vec(n), y1 = random_vec(n), y2 = random_vec(n),
       y3 = random_vec(n);
  auto fx = random_vec(4), nx = random_vec(4);
  std::vector<double> z_scalar(n), z_active(n);
  k::pair_row(0.5, fx.data(), nx.data(), y0.data(), y1.data(), y2.data(),
              y3.data(), z_scalar.data(), n);

  // Whatever backend the machine actually has must agree bitwise through the
  // public dispatch entry point.
  k::set_backend(initial);
  k::pair_row(0.5, fx.data(), nx.data(), y0.data(), y1.data(), y2.data(),
              y3.data(), z_active.data(), n);
  CHECK(bitwise_equal(z_scalar, z_active));

#if defined(__x86_64__) || defined(_M_X64)
  if (!k::avx2_available())
    CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), Error);
  CHECK_THROWS_AS(k::set_backend(k::Backend::Neon), Error);
#endif
#if defined(__aarch64__)
  CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), Error);
#endif
  k::set_backend(initial);
}
