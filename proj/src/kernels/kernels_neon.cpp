#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstring>

#include "wlab/kernels.hpp"

// Vectorization is across output elements only; the reduction order over k
// matches the scalar kernel exactly, using separate mul and add (no FMA).
namespace wlab::kernels {

void apply_dmat_neon(const double* D, const double* in, double* out,
                     std::size_t nr, std::size_t n, std::size_t nc) {
  for (std::size_t r = 0; r < nr; ++r) {
    const double* drow = D + r * n;
    double* orow = out + r * nc;
    std::size_t c = 0;
    for (; c + 8 <= nc; c += 8) {
      float64x2_t a0 = vdupq_n_f64(0.0);
      float64x2_t a1 = vdupq_n_f64(0.0);
      float64x2_t a2 = vdupq_n_f64(0.0);
      float64x2_t a3 = vdupq_n_f64(0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const float64x2_t d = vdupq_n_f64(drow[k]);
        const double* irow = in + k * nc + c;
        a0 = vaddq_f64(a0, vmulq_f64(d, vld1q_f64(irow)));
        a1 = vaddq_f64(a1, vmulq_f64(d, vld1q_f64(irow + 2)));
        a2 = vaddq_f64(a2, vmulq_f64(d, vld1q_f64(irow + 4)));
        a3 = vaddq_f64(a3, vmulq_f64(d, vld1q_f64(irow + 6)));
      }
      vst1q_f64(orow + c, a0);
      vst1q_f64(orow + c + 2, a1);
      vst1q_f64(orow + c + 4, a2);
      vst1q_f64(orow + c + 6, a3);
    }
    for (; c + 2 <= nc; c += 2) {
      float64x2_t a0 = vdupq_n_f64(0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const float64x2_t d = vdupq_n_f64(drow[k]);
        a0 = vaddq_f64(a0, vmulq_f64(d, vld1q_f64(in + k * nc + c)));
      }
      vst1q_f64(orow + c, a0);
    }
    for (; c < nc; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += drow[k] * in[k * nc + c];
      orow[c] = acc;
    }
  }
}

void pair_row_neon(double phi, const double* fx, const double* nx,
                   const double* y0, const double* y1, const double* y2,
                   const double* y3, double* z, std::size_t m) {
  const float64x2_t f0 = vdupq_n_f64(fx[0]);
  const float64x2_t f1 = vdupq_n_f64(fx[1]);
  const float64x2_t f2 = vdupq_n_f64(fx[2]);
  const float64x2_t f3 = vdupq_n_f64(fx[3]);
  const float64x2_t g0 = vdupq_n_f64(nx[0]);
  const float64x2_t g1 = vdupq_n_f64(nx[1]);
  const float64x2_t g2 = vdupq_n_f64(nx[2]);
  const float64x2_t g3 = vdupq_n_f64(nx[3]);
  const float64x2_t ph = vdupq_n_f64(phi);
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t j = 0;
  for (; j + 2 <= m; j += 2) {
    const float64x2_t a = vld1q_f64(y0 + j);
    const float64x2_t b = vld1q_f64(y1 + j);
    const float64x2_t c = vld1q_f64(y2 + j);
    const float64x2_t d = vld1q_f64(y3 + j);
    float64x2_t df = vmulq_f64(f0, a);
    df = vaddq_f64(df, vmulq_f64(f1, b));
    df = vaddq_f64(df, vmulq_f64(f2, c));
    df = vaddq_f64(df, vmulq_f64(f3, d));
    float64x2_t dn = vmulq_f64(g0, a);
    dn = vaddq_f64(dn, vmulq_f64(g1, b));
    dn = vaddq_f64(dn, vmulq_f64(g2, c));
    dn = vaddq_f64(dn, vmulq_f64(g3, d));
    const float64x2_t zv = vsubq_f64(vmulq_f64(ph, vsubq_f64(one, df)), dn);
    vst1q_f64(z + j, zv);
  }
  if (j < m) pair_row_scalar(phi, fx, nx, y0 + j, y1 + j, y2 + j, y3 + j, z + j, m - j);
}

}  // namespace wlab::kernels

#endif
