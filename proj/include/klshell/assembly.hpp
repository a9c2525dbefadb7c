#pragma once

// Global residual and tangent of the shell. Unknowns are control-point
// displacements, three per point, ordered 3 * point + component.
//
//   R = f_int - f_ext,   K = dR/du.

#include <vector>

#include <Eigen/Sparse>

#include "constitution.hpp"
#include "mesh.hpp"

namespace klshell {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Assembly {
  Eigen::VectorXd r;
  Triplets k;
  bool with_tangent = true;
  Eigen::VectorXd f_int;  // internal force alone, when the assembler records it

  explicit Assembly(int n_dof, bool tangent = true) : r(Eigen::VectorXd::Zero(n_dof)), with_tangent(tangent) {}

  Eigen::SparseMatrix<double> matrix() const {
    Eigen::SparseMatrix<double> K(r.size(), r.size());
    K.setFromTriplets(k.begin(), k.end());
    return K;
  }
};

inline std::vector<Vec3> current_points(const ShellMesh& m, const Eigen::VectorXd& u) {
  std::vector<Vec3> x(m.n_ctrl());
  for (int k = 0; k < m.n_ctrl(); ++k) x[k] = m.patch.ctrl[k] + u.segment<3>(3 * k);
  return x;
}

// Current surface quantities at one basis evaluation.
struct PointKinematics {
  SurfaceSample x;
  SurfacePointState s;
  Mat2 gamma[2];  // Christoffel symbols a^g . x_,ab
};

inline PointKinematics point_kinematics(const BasisEval& b, const std::vector<Vec3>& pts) {
  PointKinematics p;
  p.x = surface_sample(b, pts);
  try {
    p.s = surface_point(p.x.d);
  } catch (const DegenerateTangents& ex) {
    throw DegenerateElement(std::string("degenerate element: ") + ex.what());
  }
  for (int g = 0; g < 2; ++g) {
    const Vec3& ag = p.s.duals[g];
    p.gamma[g] << ag.dot(p.x.d.x11), ag.dot(p.x.d.x12), ag.dot(p.x.d.x12), ag.dot(p.x.d.x22);
  }
  return p;
}

// Rows of the Voigt strain variations (da11, da22, da12) and (db11, db22, db12)
// with respect to the local unknowns of one quadrature point.
struct StrainOperators {
  Eigen::Matrix<double, 3, Eigen::Dynamic> Da, Db;
  std::vector<Eigen::Vector3d> beta;  // N_,ab - gamma^g_ab N_,g per basis function
};

inline StrainOperators strain_operators(const BasisEval& b, const PointKinematics& p) {
  const int n = static_cast<int>(b.idx.size());
  StrainOperators op;
  op.Da.resize(3, 3 * n);
  op.Db.resize(3, 3 * n);
  op.beta.resize(n);
  const Vec3& a1 = p.s.tangents[0];
  const Vec3& a2 = p.s.tangents[1];
  const Vec3& nrm = p.s.normal;
  for (int k = 0; k < n; ++k) {
    const double N1 = b.Nu[k], N2 = b.Nv[k];
    const Eigen::Vector3d beta(b.Nuu[k] - p.gamma[0](0, 0) * N1 - p.gamma[1](0, 0) * N2,
                               b.Nvv[k] - p.gamma[0](1, 1) * N1 - p.gamma[1](1, 1) * N2,
                               b.Nuv[k] - p.gamma[0](0, 1) * N1 - p.gamma[1](0, 1) * N2);
    op.beta[k] = beta;
    for (int i = 0; i < 3; ++i) {
      const int c = 3 * k + i;
      op.Da(0, c) = 2.0 * N1 * a1(i);
      op.Da(1, c) = 2.0 * N2 * a2(i);
      op.Da(2, c) = N1 * a2(i) + N2 * a1(i);
      op.Db.col(c) = beta * nrm(i);
    }
  }
  return op;
}

// Scatter a local vector and matrix into the global system.
inline void scatter(Assembly& out, const std::vector<int>& conn, const Eigen::VectorXd& re, const Eigen::MatrixXd* Ke) {
  const int n = static_cast<int>(conn.size());
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 3; ++i) out.r(3 * conn[a] + i) += re(3 * a + i);
  if (!Ke || !out.with_tangent) return;
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < 3; ++k) {
          const double v = (*Ke)(3 * a + i, 3 * b + k);
          if (v != 0.0) out.k.emplace_back(3 * conn[a] + i, 3 * conn[b] + k, v);
        }
}

// Internal virtual work  int 1/2 da:tau + db:M0 dA  and its linearization.
inline void add_internal(const ShellMesh& mesh, const std::vector<Vec3>& pts, const MaterialSpec& mat,
                         const ShellModel& model, Assembly& out) {
  for (const Element& e : mesh.elements) {
    const int n = static_cast<int>(e.conn.size());
    Eigen::VectorXd re = Eigen::VectorXd::Zero(3 * n);
    Eigen::MatrixXd Ke;
    if (out.with_tangent) Ke = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const QuadPoint& q : e.qp) {
      const PointKinematics p = point_kinematics(q.basis, pts);
      SurfacePointState s = p.s;
      s.J_area = s.area / q.ref.dA;
      const Resultants R = shell_resultants(mat, model, s, q.ref);
      const StrainOperators op = strain_operators(q.basis, p);
      const double dA = q.w * q.ref.dA;
      re += dA * (0.5 * op.Da.transpose() * to_voigt(R.s.tau) + op.Db.transpose() * to_voigt(R.s.M0));
      if (!out.with_tangent) continue;

      const Eigen::Matrix3d C = to_voigt(R.t.c), D = to_voigt(R.t.d), E = to_voigt(R.t.e), F = to_voigt(R.t.f);
      Ke.noalias() += dA * (op.Da.transpose() * (0.25 * C) * op.Da + op.Da.transpose() * (0.5 * D) * op.Db +
                            op.Db.transpose() * (0.5 * E) * op.Da + op.Db.transpose() * F * op.Db);

      // geometric part: tau : 1/2 DDa and M0 : DDb
      const Mat2 tau = sym(R.s.tau), M0 = sym(R.s.M0);
      const Vec3& nrm = p.s.normal;
      const double M0b = dot(M0, p.s.b_cov);
      std::vector<Vec3> P(n);
      std::vector<double> mt(n);
      for (int a = 0; a < n; ++a) {
        P[a] = q.basis.Nu[a] * p.s.duals[0] + q.basis.Nv[a] * p.s.duals[1];
        const Eigen::Vector3d& be = op.beta[a];
        mt[a] = M0(0, 0) * be(0) + M0(1, 1) * be(1) + 2.0 * M0(0, 1) * be(2);
      }
      for (int a = 0; a < n; ++a) {
        const Eigen::Vector2d Na(q.basis.Nu[a], q.basis.Nv[a]);
        for (int b = 0; b < n; ++b) {
          const Eigen::Vector2d Nb(q.basis.Nu[b], q.basis.Nv[b]);
          const double tg = Na.dot(tau * Nb);
          const double Qab = Na.dot(p.s.a_con * Nb);
          Mat3 blk = tg * Mat3::Identity() - mt[b] * nrm * P[a].transpose() - mt[a] * P[b] * nrm.transpose() -
                     (M0b * Qab) * nrm * nrm.transpose();
          Ke.block<3, 3>(3 * a, 3 * b) += dA * blk;
        }
      }
    }
    scatter(out, e.conn, re, out.with_tangent ? &Ke : nullptr);
  }
}

}  // namespace klshell
