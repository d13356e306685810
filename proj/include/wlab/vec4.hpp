#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wlab {

struct Vec4 {
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};

  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  Vec4 operator+(const Vec4& o) const {
    return {{v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2], v[3] + o.v[3]}};
  }
  Vec4 operator-(const Vec4& o) const {
    return {{v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2], v[3] - o.v[3]}};
  }
  Vec4 operator*(double s) const {
    return {{v[0] * s, v[1] * s, v[2] * s, v[3] * s}};
  }
  Vec4& operator+=(const Vec4& o) {
    for (std::size_t i = 0; i < 4; ++i) v[i] += o.v[i];
    return *this;
  }
  Vec4& operator-=(const Vec4& o) {
    for (std::size_t i = 0; i < 4; ++i) v[i] -= o.v[i];
    return *this;
  }
};

inline Vec4 operator*(double s, const Vec4& a) { return a * s; }

inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline double norm(const Vec4& a) { return std::sqrt(dot(a, a)); }

inline Vec4 normalized(const Vec4& a) {
  double n = norm(a);
  return a * (1.0 / n);
}

// Hodge dual of a wedge b wedge c: the unique vector d with
// <d, x> = det[x a b c] for all x.  Orientation fixed so that
// cross4(e1, e2, e3) = -e4 wrt det[e4 e1 e2 e3] = -1 convention below;
// callers fix the sign they need from geometry.
inline Vec4 cross4(const Vec4& a, const Vec4& b, const Vec4& c) {
  auto det3 = [](double a0, double a1, double a2, double b0, double b1,
                 double b2, double c0, double c1, double c2) {
    return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) +
           a2 * (b0 * c1 - b1 * c0);
  };
  Vec4 d;
  d[0] = det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]);
  d[1] = -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]);
  d[2] = det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]);
  d[3] = -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
  return d;
}

}  // namespace wlab
