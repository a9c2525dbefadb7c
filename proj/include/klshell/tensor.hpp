#pragma once

// Small fixed-size tensor algebra on 2D surface indices.
//
// Symmetric 2x2 tensors are plain Eigen::Matrix2d. Rank-4 tensors keep all
// 16 entries; no major symmetry is assumed. Voigt triples (11, 22, 12) are
// used only at element assembly, see to_voigt().

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace klshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct Tensor4 {
  std::array<double, 16> v{};

  double& operator()(int a, int b, int c, int d) { return v[((a * 2 + b) * 2 + c) * 2 + d]; }
  double operator()(int a, int b, int c, int d) const { return v[((a * 2 + b) * 2 + c) * 2 + d]; }

  Tensor4& operator+=(const Tensor4& o) {
    for (int i = 0; i < 16; ++i) v[i] += o.v[i];
    return *this;
  }
  Tensor4& operator-=(const Tensor4& o) {
    for (int i = 0; i < 16; ++i) v[i] -= o.v[i];
    return *this;
  }
  Tensor4& operator*=(double s) {
    for (double& x : v) x *= s;
    return *this;
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

inline Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
inline Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
inline Tensor4 operator*(double s, Tensor4 a) { return a *= s; }
inline Tensor4 operator*(Tensor4 a, double s) { return a *= s; }

// (x (x) y)^{abgd} = x^{ab} y^{gd}
inline Tensor4 outer(const Mat2& x, const Mat2& y) {
  Tensor4 t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) t(a, b, c, d) = x(a, b) * y(c, d);
  return t;
}

// -1/2 (m^{ag} m^{bd} + m^{ad} m^{bg})
inline Tensor4 inverse_variation(const Mat2& m) {
  Tensor4 t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) t(a, b, c, d) = -0.5 * (m(a, c) * m(b, d) + m(a, d) * m(b, c));
  return t;
}

// b^{abgd} = 2H (a^{ab} a^{gd} + a^{abgd}) - (a^{ab} b^{gd} + b^{ab} a^{gd})
inline Tensor4 curvature_variation(const Mat2& a_con, const Mat2& b_con, double H) {
  Tensor4 t = 2.0 * H * (outer(a_con, a_con) + inverse_variation(a_con));
  t -= outer(a_con, b_con) + outer(b_con, a_con);
  return t;
}

// C^{abgd} X_gd
inline Mat2 contract(const Tensor4& C, const Mat2& X) {
  Mat2 r = Mat2::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) r(a, b) += C(a, b, c, d) * X(c, d);
  return r;
}

inline double dot(const Mat2& x, const Mat2& y) { return (x.array() * y.array()).sum(); }

inline Mat2 sym(const Mat2& m) { return 0.5 * (m + m.transpose()); }

// Voigt order 11, 22, 12. Off-diagonal entries carry the factor 2 that the
// full double sum over both index orders produces, so for symmetric X, Y
//   X_ab C^{abgd} Y_gd = voigt_strain(X)^T to_voigt(C) voigt_strain(Y)
// with voigt_strain(X) = (X11, X22, X12).
inline constexpr int kVoigtA[3] = {0, 1, 0};
inline constexpr int kVoigtB[3] = {0, 1, 1};

inline Eigen::Matrix3d to_voigt(const Tensor4& C) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int a = kVoigtA[i], b = kVoigtB[i], c = kVoigtA[j], d = kVoigtB[j];
      const double fi = (i == 2) ? 2.0 : 1.0;
      const double fj = (j == 2) ? 2.0 : 1.0;
      m(i, j) = fi * fj * 0.25 * (C(a, b, c, d) + C(b, a, c, d) + C(a, b, d, c) + C(b, a, d, c));
    }
  return m;
}

inline Eigen::Vector3d to_voigt(const Mat2& S) {
  return Eigen::Vector3d(S(0, 0), S(1, 1), S(0, 1) + S(1, 0));
}

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace klshell
