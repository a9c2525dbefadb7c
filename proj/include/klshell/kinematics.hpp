#pragma once

// Kirchhoff-Love surface kinematics at a single point: metric, curvature,
// through-thickness layer metric and its first derivative in xi.

#include <vector>

#include "errors.hpp"
#include "tensor.hpp"

namespace klshell {

// First and second partial derivatives of the surface map x(xi1, xi2).
struct SurfaceDerivs {
  Vec3 x1, x2;        // x_,1  x_,2
  Vec3 x11, x12, x22; // x_,11 x_,12 x_,22
};

struct SurfacePointState {
  Mat2 a_cov, a_con;
  Mat2 b_cov;
  Mat2 b_mixed;  // b^g_a = a^{gb} b_{ba}, stored as (g, a)
  Mat2 b_con;    // b^{ab}
  Vec3 normal;
  Vec3 tangents[2];
  Vec3 duals[2];  // a^a
  double area = 1.0;    // sqrt(det a)
  double J_area = 1.0;  // sqrt(det a / det A)
  double H_mean = 0.0;
};

struct ReferenceFiber {
  Vec3 direction;  // projected, unit 3-vector
  Vec2 L_con;      // L^a
  Vec2 L_cov;      // L_a
  Mat2 LL;         // L^a L^b
};

struct ReferencePointState {
  Mat2 A_cov, A_con;
  Mat2 B_cov, B_con;
  double H0_mean = 0.0;
  double dA = 1.0;  // sqrt(det A)
  Vec3 normal{0, 0, 1};
  std::vector<ReferenceFiber> fibers;
};

struct LayerState {
  double xi = 0.0;
  Mat2 g_cov, g_con;
  Mat2 G_cov, G_con;
  double Jstar = 1.0;
  double I1 = 2.0;               // G^{ab} g_ab
  std::vector<Mat2> L;           // layer fiber tensors L*^{ab}
  std::vector<double> I4;        // g_ab L*^{ab}
};

struct XiDerivatives {
  double Jhat_3 = 0.0;
  double I1hat_3 = 0.0;
  Mat2 ghat_con_3 = Mat2::Zero();
  std::vector<Mat2> Lhat_3;
  std::vector<double> I4hat_3;
};

struct VariationTensors {
  Tensor4 a4;  // a^{abgd}
  Tensor4 b4;  // b^{abgd}
};

namespace detail {

inline void fill_forms(SurfacePointState& s, const Mat2& a, const Mat2& b) {
  s.a_cov = a;
  s.a_con = a.inverse();
  s.b_cov = b;
  s.b_mixed = s.a_con * b;
  s.b_con = s.a_con * b * s.a_con;
  s.H_mean = 0.5 * dot(s.a_con, b);
  s.area = std::sqrt(a.determinant());
}

}  // namespace detail

inline SurfacePointState surface_point(const SurfaceDerivs& d) {
  SurfacePointState s;
  s.tangents[0] = d.x1;
  s.tangents[1] = d.x2;
  const Vec3 c = d.x1.cross(d.x2);
  const double cn = c.norm();
  if (!(cn >= 1e-14 * d.x1.norm() * d.x2.norm()) || cn == 0.0)
    throw DegenerateTangents("surface tangents are linearly dependent");
  s.normal = c / cn;
  Mat2 a, b;
  a << d.x1.dot(d.x1), d.x1.dot(d.x2), d.x2.dot(d.x1), d.x2.dot(d.x2);
  b << s.normal.dot(d.x11), s.normal.dot(d.x12), s.normal.dot(d.x12), s.normal.dot(d.x22);
  detail::fill_forms(s, a, b);
  s.duals[0] = s.a_con(0, 0) * d.x1 + s.a_con(0, 1) * d.x2;
  s.duals[1] = s.a_con(1, 0) * d.x1 + s.a_con(1, 1) * d.x2;
  s.J_area = s.area;
  return s;
}

inline SurfacePointState surface_point(const SurfaceDerivs& d, const ReferencePointState& r) {
  SurfacePointState s = surface_point(d);
  s.J_area = s.area / r.dA;
  return s;
}

// State built directly from the fundamental forms; tangent vectors are a
// planar frame reproducing a. Used where only a and b matter.
inline SurfacePointState surface_from_forms(const Mat2& a, const Mat2& b, const ReferencePointState& r) {
  SurfacePointState s;
  if (!(a(0, 0) > 0.0) || !(a.determinant() > 0.0)) throw DegenerateTangents("metric is not positive definite");
  detail::fill_forms(s, sym(a), sym(b));
  const double s11 = std::sqrt(a(0, 0));
  s.tangents[0] = Vec3(s11, 0, 0);
  s.tangents[1] = Vec3(a(0, 1) / s11, s.area / s11, 0);
  s.normal = Vec3(0, 0, 1);
  s.duals[0] = s.a_con(0, 0) * s.tangents[0] + s.a_con(0, 1) * s.tangents[1];
  s.duals[1] = s.a_con(1, 0) * s.tangents[0] + s.a_con(1, 1) * s.tangents[1];
  s.J_area = s.area / r.dA;
  return s;
}

// Fiber directions are ambient 3-vectors, projected on the tangent plane and
// normalized with respect to A.
inline ReferencePointState reference_point(const SurfaceDerivs& d, const std::vector<Vec3>& fiber_dirs = {}) {
  const SurfacePointState s = surface_point(d);
  ReferencePointState r;
  r.A_cov = s.a_cov;
  r.A_con = s.a_con;
  r.B_cov = s.b_cov;
  r.B_con = s.b_con;
  r.H0_mean = s.H_mean;
  r.dA = s.area;
  r.normal = s.normal;
  for (const Vec3& f : fiber_dirs) {
    const Vec3 p = f - f.dot(s.normal) * s.normal;
    if (p.norm() < 1e-12 * std::max(1.0, f.norm())) throw InvalidMaterial("fiber direction is normal to the surface");
    ReferenceFiber fib;
    fib.direction = p.normalized();
    fib.L_con = Vec2(fib.direction.dot(s.duals[0]), fib.direction.dot(s.duals[1]));
    fib.L_con /= std::sqrt(fib.L_con.dot(r.A_cov * fib.L_con));
    fib.L_cov = r.A_cov * fib.L_con;
    fib.LL = fib.L_con * fib.L_con.transpose();
    r.fibers.push_back(fib);
  }
  return r;
}

// Reference state from forms and contravariant fiber components (tests).
inline ReferencePointState reference_from_forms(const Mat2& A, const Mat2& B, const std::vector<Vec2>& fibers_con = {}) {
  ReferencePointState r;
  r.A_cov = sym(A);
  r.A_con = r.A_cov.inverse();
  r.B_cov = sym(B);
  r.B_con = r.A_con * r.B_cov * r.A_con;
  r.H0_mean = 0.5 * dot(r.A_con, r.B_cov);
  r.dA = std::sqrt(r.A_cov.determinant());
  for (Vec2 l : fibers_con) {
    ReferenceFiber fib;
    l /= std::sqrt(l.dot(r.A_cov * l));
    fib.L_con = l;
    fib.L_cov = r.A_cov * l;
    fib.LL = l * l.transpose();
    fib.direction = Vec3(l.x(), l.y(), 0.0);
    r.fibers.push_back(fib);
  }
  return r;
}

// Layer fibers: the reference fiber expressed in the layer basis
// G_a = A_a - xi B_a^g A_g, renormalized in the truncated layer metric.
inline Vec2 layer_fiber(const ReferencePointState& r, const ReferenceFiber& f, double xi, const Mat2& G_cov,
                        const Mat2& G_con) {
  const Mat2 B_mixed_low = r.B_cov * r.A_con;  // B_b^g as (b, g)
  const Vec2 cov = f.L_cov - xi * (B_mixed_low * f.L_cov);
  Vec2 l = G_con * cov;
  return l / std::sqrt(l.dot(G_cov * l));
}

inline LayerState layer_state(const SurfacePointState& s, const ReferencePointState& r, double xi) {
  LayerState ls;
  ls.xi = xi;
  ls.g_cov = s.a_cov - 2.0 * xi * s.b_cov;
  ls.G_cov = r.A_cov - 2.0 * xi * r.B_cov;
  const double dg = ls.g_cov.determinant();
  const double dG = ls.G_cov.determinant();
  if (!(dg > 0.0)) throw DegenerateLayer("layer metric is not positive definite");
  if (!(dG > 0.0)) throw DegenerateLayer("reference layer metric is not positive definite");
  ls.g_con = ls.g_cov.inverse();
  ls.G_con = ls.G_cov.inverse();
  ls.Jstar = std::sqrt(dg / dG);
  ls.I1 = dot(ls.G_con, ls.g_cov);
  for (const ReferenceFiber& f : r.fibers) {
    const Vec2 l = (xi == 0.0) ? f.L_con : layer_fiber(r, f, xi, ls.G_cov, ls.G_con);
    const Mat2 L = l * l.transpose();
    ls.L.push_back(L);
    ls.I4.push_back(dot(ls.g_cov, L));
  }
  return ls;
}

inline VariationTensors variation_tensors(const SurfacePointState& s) {
  return {inverse_variation(s.a_con), curvature_variation(s.a_con, s.b_con, s.H_mean)};
}

inline Tensor4 variation_tensor(const LayerState& ls) { return inverse_variation(ls.g_con); }

inline XiDerivatives xi_derivatives(const SurfacePointState& s, const ReferencePointState& r) {
  XiDerivatives xd;
  xd.Jhat_3 = 2.0 * s.J_area * (r.H0_mean - s.H_mean);
  xd.I1hat_3 = 2.0 * (dot(s.a_cov, r.B_con) - dot(s.b_cov, r.A_con));
  xd.ghat_con_3 = 2.0 * s.b_con;
  for (const ReferenceFiber& f : r.fibers) {
    const Vec2 l3 = r.B_con * f.L_cov;  // L^a_,3 = B^{ab} L_b
    const Mat2 L3 = l3 * f.L_con.transpose() + f.L_con * l3.transpose();
    xd.Lhat_3.push_back(L3);
    xd.I4hat_3.push_back(-2.0 * dot(s.b_cov, f.LL) + dot(s.a_cov, L3));
  }
  return xd;
}

}  // namespace klshell
