#pragma once

// Rigid spherical indenter with penalty contact at the quadrature points:
// energy 1/2 eps g^2 dA0 wherever the gap g = |x - c| - R is negative.

#include "assembly.hpp"

namespace klshell {

struct Sphere {
  Vec3 center0 = Vec3::Zero();  // center at lambda = 0
  Vec3 travel = Vec3::Zero();   // center displacement at lambda = 1
  double radius = 1.0;
  double eps = 0.0;

  Vec3 center(double lambda) const { return center0 + lambda * travel; }
};

// Adds the contact terms and returns the total force the sphere exerts on the shell.
inline Vec3 add_contact(const ShellMesh& mesh, const std::vector<Vec3>& pts, const Sphere& sp, double lambda,
                        Assembly& out) {
  const Vec3 c = sp.center(lambda);
  Vec3 total = Vec3::Zero();
  for (const Element& e : mesh.elements) {
    const int n = static_cast<int>(e.conn.size());
    Eigen::VectorXd re = Eigen::VectorXd::Zero(3 * n);
    Eigen::MatrixXd Ke;
    if (out.with_tangent) Ke = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    bool touched = false;
    for (const QuadPoint& q : e.qp) {
      Vec3 x = Vec3::Zero();
      for (int a = 0; a < n; ++a) x += q.basis.N[a] * pts[q.basis.idx[a]];
      const Vec3 r = x - c;
      const double d = r.norm();
      const double g = d - sp.radius;
      if (!(g < 0.0)) continue;
      touched = true;
      const Vec3 ns = r / d;
      const double dA = q.w * q.ref.dA;
      total -= (sp.eps * g * dA) * ns;
      const Mat3 H = ns * ns.transpose() + (g / d) * (Mat3::Identity() - ns * ns.transpose());
      for (int a = 0; a < n; ++a) {
        re.segment<3>(3 * a) += (sp.eps * g * dA * q.basis.N[a]) * ns;
        if (!out.with_tangent) continue;
        for (int b = 0; b < n; ++b) Ke.block<3, 3>(3 * a, 3 * b) += (sp.eps * dA * q.basis.N[a] * q.basis.N[b]) * H;
      }
    }
    if (touched) scatter(out, e.conn, re, out.with_tangent ? &Ke : nullptr);
  }
  return total;
}

inline double contact_energy(const ShellMesh& mesh, const std::vector<Vec3>& pts, const Sphere& sp, double lambda) {
  const Vec3 c = sp.center(lambda);
  double E = 0.0;
  for (const Element& e : mesh.elements)
    for (const QuadPoint& q : e.qp) {
      const double g = (surface_sample(q.basis, pts).x - c).norm() - sp.radius;
      if (g < 0.0) E += 0.5 * sp.eps * g * g * q.w * q.ref.dA;
    }
  return E;
}

}  // namespace klshell
