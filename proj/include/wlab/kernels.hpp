#pragma once

#include <cstddef>

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants selected at runtime.  Every variant performs the same operations in
// the same order per output element (multiplies and adds only, no FMA), so all
// backends produce bit-identical results; the test suite asserts this.
namespace wlab::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
const char* backend_name(Backend b);
// Override for tests; throws Error(BadInput) if the backend is unsupported on
// this machine.  The WLAB_SIMD environment variable ("scalar", "avx2", "neon")
// sets the initial selection.
void set_backend(Backend b);

// out = D * in with D dense nr x n (row-major), in n x nc, out nr x nc.
// Accumulation order per element is k = 0..n-1.
void apply_dmat(const double* D, const double* in, double* out, std::size_t nr,
                std::size_t n, std::size_t nc);

// Tangent-ball row evaluation: given one base point (phi, fx[4], nx[4]) and m
// target points in SoA layout (y0..y3), computes
//   z[j] = phi * (1 - (fx.y_j)) - (nx.y_j).
void pair_row(double phi, const double* fx, const double* nx, const double* y0,
              const double* y1, const double* y2, const double* y3, double* z,
              std::size_t m);

// Direct entry points used by the equivalence tests.
void apply_dmat_scalar(const double* D, const double* in, double* out,
                       std::size_t nr, std::size_t n, std::size_t nc);
void pair_row_scalar(double phi, const double* fx, const double* nx,
                     const double* y0, const double* y1, const double* y2,
                     const double* y3, double* z, std::size_t m);
#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available();
void apply_dmat_avx2(const double* D, const double* in, double* out,
                     std::size_t nr, std::size_t n, std::size_t nc);
void pair_row_avx2(double phi, const double* fx, const double* nx,
                   const double* y0, const double* y1, const double* y2,
                   const double* y3, double* z, std::size_t m);
#endif
#if defined(__aarch64__)
void apply_dmat_neon(const double* D, const double* in, double* out,
                     std::size_t nr, std::size_t n, std::size_t nc);
void pair_row_neon(double phi, const double* fx, const double* nx,
                   const double* y0, const double* y1, const double* y2,
                   const double* y3, double* z, std::size_t m);
#endif

}  // namespace wlab::kernels
