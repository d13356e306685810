#include <cstdlib>
#include <cstring>

#include "wlab/errors.hpp"
#include "wlab/kernels.hpp"

namespace wlab::kernels {

namespace {

Backend detect() {
  if (const char* env = std::getenv("WLAB_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::Avx2;
#endif
#if defined(__aarch64__)
    if (std::strcmp(env, "neon") == 0) return Backend::Neon;
#endif
    return Backend::Scalar;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (avx2_available()) return Backend::Avx2;
#endif
#if defined(__aarch64__)
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

Backend g_backend = detect();

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

void set_backend(Backend b) {
  switch (b) {
    case Backend::Scalar:
      break;
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (!avx2_available()) raise(ErrorCode::BadInput, "avx2 not supported here");
#else
      raise(ErrorCode::BadInput, "avx2 not supported here");
#endif
      break;
    case Backend::Neon:
#if !defined(__aarch64__)
      raise(ErrorCode::BadInput, "neon not supported here");
#endif
      break;
  }
  g_backend = b;
}

void apply_dmat(const double* D, const double* in, double* out, std::size_t nr,
                std::size_t n, std::size_t nc) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2:
      apply_dmat_avx2(D, in, out, nr, n, nc);
      return;
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      apply_dmat_neon(D, in, out, nr, n, nc);
      return;
#endif
    default:
      apply_dmat_scalar(D, in, out, nr, n, nc);
      return;
  }
}

void pair_row(double phi, const double* fx, const double* nx, const double* y0,
              const double* y1, const double* y2, const double* y3, double* z,
              std::size_t m) {
  switch (g_backend) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::Avx2:
      pair_row_avx2(phi, fx, nx, y0, y1, y2, y3, z, m);
      return;
#endif
#if defined(__aarch64__)
    case Backend::Neon:
      pair_row_neon(phi, fx, nx, y0, y1, y2, y3, z, m);
      return;
#endif
    default:
      pair_row_scalar(phi, fx, nx, y0, y1, y2, y3, z, m);
      return;
  }
}

}  // namespace wlab::kernels
