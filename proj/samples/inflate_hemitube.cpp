// Builds a problem in code, without a scenario file: a half tube with
// clamped ends inflated by follower pressure, solved under each pipeline.

#include <iomanip>
#include <iostream>

#include "klshell/problem.hpp"

using namespace klshell;

int main() {
  // The hemitube normal points toward its axis, so a negative pressure inflates it.
  const double T = 0.05, R = 1.0, length = 3.0, p = -0.05;
  std::cout << "pipeline  apex displacement [mm]  Newton increments\n";
  for (const ShellModel model : {ShellModel{Pipeline::NP, 2}, ShellModel{Pipeline::AP, 0}, ShellModel{Pipeline::DD, 0}}) {
    Problem pb;
    pb.setup(make_hemitube(T, R, length, 8, 6), preset(Model::NH, T), model);
    for (Edge e : {Edge::vmin, Edge::vmax}) fix_nodes(pb.dofs, edge_nodes(pb.mesh.patch, e), {0, 1, 2});
    for (Edge e : {Edge::umin, Edge::umax}) fix_nodes(pb.dofs, edge_nodes(pb.mesh.patch, e), {0, 1, 2});
    pb.pressures.push_back({p});

    NewtonOptions opt = default_options(pb);
    opt.steps = 5;
    Eigen::VectorXd u;
    const NewtonReport rep = solve(pb, opt, u);

    const NurbsPatch& P = pb.mesh.patch;
    const BasisEval b = basis_eval(P, 0.5 * (P.umin() + P.umax()), 0.5 * (P.vmin() + P.vmax()));
    Vec3 d = Vec3::Zero();
    for (std::size_t k = 0; k < b.idx.size(); ++k) d += b.N[k] * u.segment<3>(3 * b.idx[k]);
    std::cout << std::left << std::setw(10) << pipeline_name(model.pipeline) << std::setw(24) << d.norm()
              << rep.steps.size() << '\n';
  }
}
