#include <cstring>

#include "wlab/kernels.hpp"

namespace wlab::kernels {

void apply_dmat_scalar(const double* D, const double* in, double* out,
                       std::size_t nr, std::size_t n, std::size_t nc) {
  for (std::size_t r = 0; r < nr; ++r) {
    const double* drow = D + r * n;
    double* orow = out + r * nc;
    std::memset(orow, 0, nc * sizeof(double));
    for (std::size_t k = 0; k < n; ++k) {
      const double d = drow[k];
      const double* irow = in + k * nc;
      for (std::size_t c = 0; c < nc; ++c) orow[c] += d * irow[c];
    }
  }
}

void pair_row_scalar(double phi, const double* fx, const double* nx,
                     const double* y0, const double* y1, const double* y2,
                     const double* y3, double* z, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double df = fx[0] * y0[j];
    df += fx[1] * y1[j];
    df += fx[2] * y2[j];
    df += fx[3] * y3[j];
    double dn = nx[0] * y0[j];
    dn += nx[1] * y1[j];
    dn += nx[2] * y2[j];
    dn += nx[3] * y3[j];
    z[j] = phi * (1.0 - df) - dn;
  }
}

}  // namespace wlab::kernels
