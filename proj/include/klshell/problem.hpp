#pragma once

// A complete boundary value problem: mesh, material, pipeline, loads and
// constraints, with the global residual as a function of (u, lambda).

#include <optional>

#include "contact.hpp"
#include "loads.hpp"
#include "newton.hpp"

namespace klshell {

struct Problem {
  ShellMesh mesh;
  MaterialSpec material;
  ShellModel model;
  DofMap dofs;
  std::vector<Pressure> pressures;
  std::vector<EdgeTraction> tractions;
  std::vector<PointForce> forces;
  std::vector<NormalPenalty> normals;  // clamps and prescribed rotations
  std::optional<Sphere> sphere;

  // Sets the mesh and material, rebuilding the reference cache with the fiber field.
  void setup(ShellMesh m, MaterialSpec mat, ShellModel mdl) {
    mat.validate();
    mesh = std::move(m);
    material = std::move(mat);
    model = mdl;
    set_fibers(mesh, material.fiber_directions());
    dofs = DofMap(mesh.n_dof());
  }

  // Characteristic force E T L used for the absolute residual tolerance.
  double force_scale() const {
    const NurbsPatch& P = mesh.patch;
    Vec3 lo = P.ctrl[0], hi = P.ctrl[0];
    for (const Vec3& x : P.ctrl) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    return material.youngs_modulus() * material.thickness * (hi - lo).maxCoeff();
  }
};

inline void assemble(const Problem& pb, const Eigen::VectorXd& u, double lambda, Assembly& out) {
  const std::vector<Vec3> x = current_points(pb.mesh, u);
  add_internal(pb.mesh, x, pb.material, pb.model, out);
  out.f_int = out.r;
  for (const Pressure& p : pb.pressures) add_pressure(pb.mesh, x, lambda * p.p, out);
  for (const EdgeTraction& t : pb.tractions) add_edge_traction(pb.mesh, t, lambda, out);
  for (const PointForce& f : pb.forces) add_point_force(f, lambda, out);
  for (const NormalPenalty& n : pb.normals) add_normal_penalty(pb.mesh, x, n, lambda, out);
  if (pb.sphere) add_contact(pb.mesh, x, *pb.sphere, lambda, out);
}

inline NewtonOptions default_options(const Problem& pb) {
  NewtonOptions o;
  o.tol_abs = 1e-8 * pb.force_scale();
  return o;
}

inline NewtonReport solve(const Problem& pb, const NewtonOptions& opt, Eigen::VectorXd& u, const StepFn& on_step = {}) {
  return newton_solve(
      pb.dofs, [&](const Eigen::VectorXd& uu, double lam, Assembly& a) { assemble(pb, uu, lam, a); }, opt, u, on_step);
}

}  // namespace klshell
