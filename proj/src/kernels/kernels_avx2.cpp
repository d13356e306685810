#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#include "wlab/kernels.hpp"

// Vectorization is across output elements only; the reduction order over k
// matches the scalar kernel exactly, using separate mul and add (no FMA).
namespace wlab::kernels {

bool avx2_available() { return __builtin_cpu_supports("avx2"); }

void apply_dmat_avx2(const double* D, const double* in, double* out,
                     std::size_t nr, std::size_t n, std::size_t nc) {
  const std::size_t c4 = nc - nc % 4;
  for (std::size_t r = 0; r < nr; ++r) {
    const double* drow = D + r * n;
    double* orow = out + r * nc;
    std::size_t c = 0;
    for (; c + 16 <= nc; c += 16) {
      __m256d a0 = _mm256_setzero_pd();
      __m256d a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd();
      __m256d a3 = _mm256_setzero_pd();
      for (std::size_t k = 0; k < n; ++k) {
        const __m256d d = _mm256_set1_pd(drow[k]);
        const double* irow = in + k * nc + c;
        a0 = _mm256_add_pd(a0, _mm256_mul_pd(d, _mm256_loadu_pd(irow)));
        a1 = _mm256_add_pd(a1, _mm256_mul_pd(d, _mm256_loadu_pd(irow + 4)));
        a2 = _mm256_add_pd(a2, _mm256_mul_pd(d, _mm256_loadu_pd(irow + 8)));
        a3 = _mm256_add_pd(a3, _mm256_mul_pd(d, _mm256_loadu_pd(irow + 12)));
      }
      _mm256_storeu_pd(orow + c, a0);
      _mm256_storeu_pd(orow + c + 4, a1);
      _mm256_storeu_pd(orow + c + 8, a2);
      _mm256_storeu_pd(orow + c + 12, a3);
    }
    for (; c < c4; c += 4) {
      __m256d a0 = _mm256_setzero_pd();
      for (std::size_t k = 0; k < n; ++k) {
        const __m256d d = _mm256_set1_pd(drow[k]);
        a0 = _mm256_add_pd(a0, _mm256_mul_pd(d, _mm256_loadu_pd(in + k * nc + c)));
      }
      _mm256_storeu_pd(orow + c, a0);
    }
    for (; c < nc; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += drow[k] * in[k * nc + c];
      orow[c] = acc;
    }
  }
}

void pair_row_avx2(double phi, const double* fx, const double* nx,
                   const double* y0, const double* y1, const double* y2,
                   const double* y3, double* z, std::size_t m) {
  const __m256d f0 = _mm256_set1_pd(fx[0]);
  const __m256d f1 = _mm256_set1_pd(fx[1]);
  const __m256d f2 = _mm256_set1_pd(fx[2]);
  const __m256d f3 = _mm256_set1_pd(fx[3]);
  const __m256d g0 = _mm256_set1_pd(nx[0]);
  const __m256d g1 = _mm256_set1_pd(nx[1]);
  const __m256d g2 = _mm256_set1_pd(nx[2]);
  const __m256d g3 = _mm256_set1_pd(nx[3]);
  const __m256d ph = _mm256_set1_pd(phi);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t j = 0;
  for (; j + 4 <= m; j += 4) {
    const __m256d a = _mm256_loadu_pd(y0 + j);
    const __m256d b = _mm256_loadu_pd(y1 + j);
    const __m256d c = _mm256_loadu_pd(y2 + j);
    const __m256d d = _mm256_loadu_pd(y3 + j);
    __m256d df = _mm256_mul_pd(f0, a);
    df = _mm256_add_pd(df, _mm256_mul_pd(f1, b));
    df = _mm256_add_pd(df, _mm256_mul_pd(f2, c));
    df = _mm256_add_pd(df, _mm256_mul_pd(f3, d));
    __m256d dn = _mm256_mul_pd(g0, a);
    dn = _mm256_add_pd(dn, _mm256_mul_pd(g1, b));
    dn = _mm256_add_pd(dn, _mm256_mul_pd(g2, c));
    dn = _mm256_add_pd(dn, _mm256_mul_pd(g3, d));
    const __m256d zv = _mm256_sub_pd(_mm256_mul_pd(ph, _mm256_sub_pd(one, df)), dn);
    _mm256_storeu_pd(z + j, zv);
  }
  if (j < m) pair_row_scalar(phi, fx, nx, y0 + j, y1 + j, y2 + j, y3 + j, z + j, m - j);
}

}  // namespace wlab::kernels

#endif
