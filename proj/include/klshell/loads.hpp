#pragma once

// External loads. Every load scales with the load factor lambda; prescribed
// normals rotate by lambda * angle.

#include <Eigen/Geometry>

#include "assembly.hpp"

namespace klshell {

// Follower pressure p n on the whole surface.
struct Pressure {
  double p = 0.0;  // [kPa]
};

// Dead traction per unit reference length on an edge.
struct EdgeTraction {
  Edge edge = Edge::umax;
  Vec3 t = Vec3::Zero();  // [kPa mm]
};

struct PointForce {
  int node = 0;
  Vec3 f = Vec3::Zero();  // [kPa mm^2]
};

// Penalty 1/2 eps int |n - nbar|^2 ds0 on an edge, with nbar the reference
// normal rotated about axis by lambda * angle.
struct NormalPenalty {
  Edge edge = Edge::vmax;
  double eps = 0.0;
  Vec3 axis = Vec3::UnitX();
  double angle = 0.0;  // [rad] at lambda = 1
  bool axis_only = false;  // leave the normal free to tilt along the axis
};

inline void add_pressure(const ShellMesh& mesh, const std::vector<Vec3>& pts, double p, Assembly& out) {
  for (const Element& e : mesh.elements) {
    const int n = static_cast<int>(e.conn.size());
    Eigen::VectorXd re = Eigen::VectorXd::Zero(3 * n);
    Eigen::MatrixXd Ke;
    if (out.with_tangent) Ke = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const QuadPoint& q : e.qp) {
      const SurfaceSample x = surface_sample(q.basis, pts);
      const Vec3 c = x.d.x1.cross(x.d.x2);  // n da per unit parametric area
      const Mat3 S1 = skew(x.d.x1), S2 = skew(x.d.x2);
      for (int a = 0; a < n; ++a) {
        re.segment<3>(3 * a) -= (q.w * p * q.basis.N[a]) * c;
        if (!out.with_tangent) continue;
        for (int b = 0; b < n; ++b)
          Ke.block<3, 3>(3 * a, 3 * b) -= (q.w * p * q.basis.N[a]) * (-q.basis.Nu[b] * S2 + q.basis.Nv[b] * S1);
      }
    }
    scatter(out, e.conn, re, out.with_tangent ? &Ke : nullptr);
  }
}

inline void add_edge_traction(const ShellMesh& mesh, const EdgeTraction& t, double lambda, Assembly& out) {
  for (const EdgePoint& ep : edge_quadrature(mesh, t.edge)) {
    const SurfaceSample X = surface_sample(ep.basis, mesh.patch.ctrl);
    const double ds = ep.w * (ep.along == 0 ? X.d.x1 : X.d.x2).norm();
    for (std::size_t a = 0; a < ep.basis.idx.size(); ++a)
      out.r.segment<3>(3 * ep.basis.idx[a]) -= (lambda * ds * ep.basis.N[a]) * t.t;
  }
}

inline void add_point_force(const PointForce& f, double lambda, Assembly& out) {
  out.r.segment<3>(3 * f.node) -= lambda * f.f;
}

inline Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()) * v;
}

namespace detail {

template <class Fn>
void for_each_edge_point(const ShellMesh& mesh, Edge edge, const std::vector<Vec3>& pts, Fn&& fn) {
  for (const EdgePoint& ep : edge_quadrature(mesh, edge)) {
    const SurfaceSample X = surface_sample(ep.basis, mesh.patch.ctrl);
    const double ds = ep.w * (ep.along == 0 ? X.d.x1 : X.d.x2).norm();
    const Vec3 N = X.d.x1.cross(X.d.x2).normalized();
    fn(ep, ds, N, point_kinematics(ep.basis, pts));
  }
}

}  // namespace detail

inline void add_normal_penalty(const ShellMesh& mesh, const std::vector<Vec3>& pts, const NormalPenalty& np,
                               double lambda, Assembly& out) {
  const Vec3 ax = np.axis.normalized();
  detail::for_each_edge_point(mesh, np.edge, pts, [&](const EdgePoint& ep, double ds, const Vec3& N,
                                                      const PointKinematics& p) {
    const BasisEval& b = ep.basis;
    const int n = static_cast<int>(b.idx.size());
    const Vec3 nbar = rotate(N, ax, lambda * np.angle);
    const Vec3& nrm = p.s.normal;
    const double w = np.eps * ds;
    const double nn = nrm.dot(nbar);
    // With axis_only the penalized gap is (I - a a^T)(n - nbar); m is its removed part.
    const double m = np.axis_only ? ax.dot(nrm - nbar) : 0.0;
    const double an = ax.dot(nrm);
    std::vector<Vec3> P(n);
    std::vector<double> sgn(n), A(n);
    const double an0 = p.s.duals[0].dot(nbar), an1 = p.s.duals[1].dot(nbar);
    for (int a = 0; a < n; ++a) {
      P[a] = b.Nu[a] * p.s.duals[0] + b.Nv[a] * p.s.duals[1];
      sgn[a] = b.Nu[a] * an0 + b.Nv[a] * an1;
      A[a] = P[a].dot(ax);
    }
    Eigen::VectorXd re(3 * n);
    Eigen::MatrixXd Ke;
    if (out.with_tangent) Ke.resize(3 * n, 3 * n);
    for (int a = 0; a < n; ++a) {
      re.segment<3>(3 * a) = (w * (sgn[a] + A[a] * m)) * nrm;
      if (!out.with_tangent) continue;
      const Eigen::Vector2d Na(b.Nu[a], b.Nv[a]);
      for (int c = 0; c < n; ++c) {
        const Eigen::Vector2d Nc(b.Nu[c], b.Nv[c]);
        const double Q = Na.dot(p.s.a_con * Nc);
        Mat3 k = (nn * Q) * nrm * nrm.transpose() - sgn[c] * nrm * P[a].transpose() - sgn[a] * P[c] * nrm.transpose();
        if (np.axis_only)
          k += m * nrm * (Q * an * nrm - A[c] * P[a]).transpose() - (A[a] * A[c]) * nrm * nrm.transpose() -
               (A[a] * m) * P[c] * nrm.transpose();
        Ke.block<3, 3>(3 * a, 3 * c) = w * k;
      }
    }
    scatter(out, b.idx, re, out.with_tangent ? &Ke : nullptr);
  });
}

// Generalized force conjugate to the prescribed rotation angle.
inline double penalty_moment(const ShellMesh& mesh, const std::vector<Vec3>& pts, const NormalPenalty& np,
                             double lambda) {
  double M = 0.0;
  const Vec3 ax = np.axis.normalized();
  detail::for_each_edge_point(mesh, np.edge, pts, [&](const EdgePoint&, double ds, const Vec3& N,
                                                      const PointKinematics& p) {
    const Vec3 nbar = rotate(N, ax, lambda * np.angle);
    M -= np.eps * ds * (p.s.normal - nbar).dot(ax.cross(nbar));
  });
  return M;
}

inline double penalty_energy(const ShellMesh& mesh, const std::vector<Vec3>& pts, const NormalPenalty& np,
                             double lambda) {
  double E = 0.0;
  const Vec3 ax = np.axis.normalized();
  detail::for_each_edge_point(mesh, np.edge, pts, [&](const EdgePoint&, double ds, const Vec3& N,
                                                      const PointKinematics& p) {
    Vec3 g = p.s.normal - rotate(N, ax, lambda * np.angle);
    if (np.axis_only) g -= ax.dot(g) * ax;
    E += 0.5 * np.eps * ds * g.squaredNorm();
  });
  return E;
}

}  // namespace klshell
