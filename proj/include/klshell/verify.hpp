#pragma once

// Property suites behind `klshell verify`: basis derivatives, knot insertion,
// material tangents, assembled tangents with every load, the switch interval
// and its sensitivities. Each check reports a measured value against a limit.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "problem.hpp"
#include "testing/global_checks.hpp"
#include "testing/oracles.hpp"

namespace klshell {

struct VerifyCheck {
  std::string suite;
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int states = 100;          // random states per material and pipeline
  int columns = 24;          // sampled columns per assembled tangent
  int switch_triples = 10000;
  double corrupt_tangent = 0.0;  // relative perturbation injected into every tangent check
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;

  bool all_pass() const {
    for (const VerifyCheck& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline void record(VerifyReport& rep, const std::string& suite, const std::string& name, double value, double limit) {
  rep.checks.push_back({suite, name, value, limit, value < limit});
}

inline std::vector<ShellModel> verify_pipelines() {
  return {{Pipeline::NP, 2}, {Pipeline::NP, 5}, {Pipeline::AP, 0}, {Pipeline::DD, 0}};
}

inline std::string model_tag(const ShellModel& sm) {
  std::string s = pipeline_name(sm.pipeline);
  if (sm.pipeline == Pipeline::NP) s += "(" + std::to_string(sm.n_gp) + ")";
  return s;
}

// Rational test patch: the hemitube net with perturbed weights.
inline NurbsPatch rational_patch(std::mt19937& rng) {
  NurbsPatch P = make_hemitube(0.1, 1.0, 2.0, 3, 3).patch;
  std::uniform_real_distribution<double> w(0.7, 1.3);
  for (double& x : P.weight) x = w(rng);
  return P;
}

// Parameter inside a knot span, away from breakpoints, so FD stencils see a smooth function.
inline double interior_param(const std::vector<double>& K, std::mt19937& rng) {
  const std::vector<double> bp = breakpoints(K);
  std::uniform_int_distribution<int> span(0, static_cast<int>(bp.size()) - 2);
  std::uniform_real_distribution<double> t(0.2, 0.8);
  const int s = span(rng);
  return bp[s] + t(rng) * (bp[s + 1] - bp[s]);
}

}  // namespace detail

inline void verify_basis(const VerifyOptions& opt, VerifyReport& rep) {
  std::mt19937 rng(static_cast<std::uint32_t>(opt.seed));
  const NurbsPatch P = detail::rational_patch(rng);
  const double h = 1e-5;
  double e1 = 0.0, e2 = 0.0;
  for (int s = 0; s < 200; ++s) {
    const double u = detail::interior_param(P.U, rng), v = detail::interior_param(P.V, rng);
    const BasisEval b = basis_eval(P, u, v);
    const BasisEval up = basis_eval(P, u + h, v), um = basis_eval(P, u - h, v);
    const BasisEval vp = basis_eval(P, u, v + h), vm = basis_eval(P, u, v - h);
    for (std::size_t k = 0; k < b.idx.size(); ++k) {
      e1 = std::max({e1, std::abs(b.Nu[k] - (up.N[k] - um.N[k]) / (2 * h)),
                     std::abs(b.Nv[k] - (vp.N[k] - vm.N[k]) / (2 * h))});
      const double sc = std::max({1.0, std::abs(b.Nuu[k]), std::abs(b.Nuv[k]), std::abs(b.Nvv[k])});
      e2 = std::max({e2, std::abs(b.Nuu[k] - (up.Nu[k] - um.Nu[k]) / (2 * h)) / sc,
                     std::abs(b.Nuv[k] - (vp.Nu[k] - vm.Nu[k]) / (2 * h)) / sc,
                     std::abs(b.Nvv[k] - (vp.Nv[k] - vm.Nv[k]) / (2 * h)) / sc});
    }
  }
  detail::record(rep, "basis", "first derivatives vs FD", e1, 1e-6);
  detail::record(rep, "basis", "second derivatives vs FD", e2, 1e-6);
}

inline void verify_knot_insertion(const VerifyOptions& opt, VerifyReport& rep) {
  std::mt19937 rng(static_cast<std::uint32_t>(opt.seed) + 1);
  ShellMesh m;
  m.patch = detail::rational_patch(rng);
  build_elements(m);
  std::uniform_real_distribution<double> f(0.0, 1.0);
  const ShellMesh g = graded_refinement(m, {f(rng), f(rng)}, 4.0);
  double ex = 0.0, ed = 0.0;
  for (int s = 0; s < 200; ++s) {
    const double u = m.patch.umin() + f(rng) * (m.patch.umax() - m.patch.umin());
    const double v = m.patch.vmin() + f(rng) * (m.patch.vmax() - m.patch.vmin());
    const SurfaceSample a = evaluate(m.patch, u, v), b = evaluate(g.patch, u, v);
    ex = std::max(ex, (a.x - b.x).norm());
    ed = std::max({ed, (a.d.x1 - b.d.x1).norm(), (a.d.x2 - b.d.x2).norm()});
  }
  detail::record(rep, "refinement", "knot insertion moves the surface", ex, 1e-12);
  detail::record(rep, "refinement", "knot insertion moves the tangents", ed, 1e-10);
}

inline void verify_material_tangents(const VerifyOptions& opt, VerifyReport& rep) {
  testing::RandomStates rs(opt.seed + 2);
  const double T = 0.2;
  for (const auto& nm : testing::verification_materials(T))
    for (const ShellModel& sm : detail::verify_pipelines()) {
      double worst = 0.0;
      for (int k = 0; k < opt.states; ++k) {
        const testing::PointSample p = testing::random_point(rs, nm.spec);
        Tensor4 bump;
        const Tensor4* corrupt = nullptr;
        if (opt.corrupt_tangent != 0.0) {
          const Resultants R = shell_resultants(nm.spec, sm, surface_from_forms(p.a, p.b, p.r), p.r);
          bump(0, 0, 0, 0) = opt.corrupt_tangent * R.t.c.max_abs();
          corrupt = &bump;
        }
        worst = std::max(worst, testing::tangent_fd_errors(nm.spec, sm, p.a, p.b, p.r, 1e-6, corrupt).max());
      }
      detail::record(rep, "material tangents", nm.name + " " + detail::model_tag(sm), worst, 1e-5);
    }
}

inline void verify_global_tangents(const VerifyOptions& opt, VerifyReport& rep) {
  std::mt19937 rng(static_cast<std::uint32_t>(opt.seed) + 3);
  const double T = 0.1;
  for (const auto& nm : testing::verification_materials(T)) {
    ShellMesh m = make_hemitube(T, 1.0, 2.0, 3, 2);
    set_fibers(m, nm.spec.fiber_directions());
    const Eigen::VectorXd u = testing::random_displacement(m, 0.01, rng);
    for (const ShellModel& sm : {ShellModel{Pipeline::NP, 0}, ShellModel{Pipeline::AP, 0}, ShellModel{Pipeline::DD, 0}}) {
      const AssembleFn f = [&](const Eigen::VectorXd& uu, double, Assembly& a) {
        add_internal(m, current_points(m, uu), nm.spec, sm, a);
      };
      const double e = testing::tangent_column_error(f, u, 0.0, testing::sample_columns(m.n_dof(), opt.columns, rng),
                                                     1e-7, opt.corrupt_tangent);
      detail::record(rep, "assembled tangents", "internal " + nm.name + " " + pipeline_name(sm.pipeline), e, 1e-5);
    }
  }

  const ShellMesh tube = make_hemitube(0.1, 1.0, 2.0, 3, 3);
  const Eigen::VectorXd ut = testing::random_displacement(tube, 0.02, rng);
  auto load_check = [&](const std::string& name, const ShellMesh& mesh, const Eigen::VectorXd& u, double lambda,
                        double h, const AssembleFn& f) {
    const double e = testing::tangent_column_error(f, u, lambda, testing::sample_columns(mesh.n_dof(), 3 * opt.columns, rng),
                                                   h, opt.corrupt_tangent);
    detail::record(rep, "assembled tangents", name, e, 1e-5);
  };
  load_check("follower pressure", tube, ut, 1.0, 1e-6, [&](const Eigen::VectorXd& uu, double, Assembly& a) {
    add_pressure(tube, current_points(tube, uu), 3.0, a);
  });
  for (bool axis_only : {false, true}) {
    const NormalPenalty np{Edge::vmax, 50.0, Vec3(0.2, 1.0, 0.1), 0.6, axis_only};
    load_check(axis_only ? "normal penalty (axis only)" : "normal penalty", tube, ut, 0.5, 1e-6,
               [&, np](const Eigen::VectorXd& uu, double lam, Assembly& a) {
                 add_normal_penalty(tube, current_points(tube, uu), np, lam, a);
               });
  }
  const ShellMesh plate = make_plate(0.25, 5.0, 4);
  const Eigen::VectorXd up = testing::random_displacement(plate, 0.002, rng);
  const Sphere sphere{Vec3(2.5, 2.5, 2.0 - 0.1), Vec3::Zero(), 2.0, 1e4};
  // The gap is smooth away from g = 0 and the smallest |g| here is ~2e-3, so a
  // wider step keeps roundoff in the weak tangential columns below 1e-6.
  load_check("sphere contact", plate, up, 0.0, 1e-4, [&](const Eigen::VectorXd& uu, double lam, Assembly& a) {
    add_contact(plate, current_points(plate, uu), sphere, lam, a);
  });

  Problem pb;
  pb.setup(make_plate(0.1, 2.0, 3), preset(Model::GOH, 0.1, {30, -30}, 0.226, true), {Pipeline::AP, 0});
  pb.pressures.push_back({0.5});
  pb.normals.push_back({Edge::umax, 10.0, Vec3::UnitY(), 0.3});
  pb.sphere = Sphere{Vec3(1.0, 1.0, 1.0), Vec3(0, 0, -0.1), 1.0, 1e3};
  pb.forces.push_back({*corner_node(pb.mesh.patch, "umax_vmax"), Vec3(0, 0, 0.1)});
  const Eigen::VectorXd ub = testing::random_displacement(pb.mesh, 0.003, rng);
  load_check("full problem, all loads", pb.mesh, ub, 1.0, 1e-7,
             [&](const Eigen::VectorXd& uu, double lam, Assembly& a) { assemble(pb, uu, lam, a); });
}

inline void verify_switch_interval(const VerifyOptions& opt, VerifyReport& rep) {
  testing::RandomStates rs(opt.seed + 4);
  const Mat2 Z0 = Mat2::Zero();
  const int n_scan = 100000;
  double worst = 0.0;
  int misses = 0;
  for (int k = 0; k < opt.switch_triples; ++k) {
    const double T = rs.uniform(0.01, 1.0);
    const double I4 = rs.uniform(0.8, 1.2);
    const double I43 = rs.uniform(-2.0, 2.0);
    const SwitchInterval s = switch_interval(I4, I43, T, Z0, Z0);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j <= n_scan; ++j) {
      const double xi = -0.5 * T + T * j / n_scan;
      if (I4 + xi * I43 > 1.0) {
        lo = std::min(lo, xi);
        hi = std::max(hi, xi);
      }
    }
    if (lo > hi) {
      if (!s.empty) worst = std::max(worst, (s.T2 - s.T1) / T);
    } else if (s.empty) {
      ++misses;
    } else {
      worst = std::max({worst, std::abs(s.T1 - lo) / T, std::abs(s.T2 - hi) / T});
    }
  }
  detail::record(rep, "switch interval", "endpoints vs dense scan (/T)", worst, 1e-4);
  detail::record(rep, "switch interval", "active intervals reported empty", misses, 0.5);
}

inline void verify_switch_sensitivities(const VerifyOptions& opt, VerifyReport& rep) {
  testing::RandomStates rs(opt.seed + 5);
  const double T = 0.2;
  const MaterialSpec m = preset(Model::GOH, T, {30, -30}, 0.0, true);
  double worst = 0.0;
  int interior = 0;
  for (int k = 0; k < 20 * opt.states && interior < 2 * opt.states; ++k) {
    const testing::PointSample p = testing::random_point(rs, m);
    auto interval = [&](const Mat2& a, const Mat2& b, int i) {
      const SurfacePointState s = surface_from_forms(a, b, p.r);
      const XiDerivatives xd = xi_derivatives(s, p.r);
      const double I4 = dot(a, p.r.fibers[i].LL);
      auto [Y, Z] = switch_sensitivities(I4, xd.I4hat_3[i], p.r.fibers[i].LL, xd.Lhat_3[i]);
      return switch_interval(I4, xd.I4hat_3[i], T, Y, Z);
    };
    for (int i = 0; i < 2; ++i) {
      const SwitchInterval s = interval(p.a, p.b, i);
      const bool lower = !s.empty && s.T1 > -0.5 * T + 1e-4;
      const bool upper = !s.empty && s.T2 < 0.5 * T - 1e-4;
      if (!lower && !upper) continue;
      ++interior;
      const double h = 1e-7;
      const Mat2& U = lower ? s.U1 : s.U2;
      const Mat2& V = lower ? s.V1 : s.V2;
      const double su = U.cwiseAbs().maxCoeff() + 1e-300, sv = V.cwiseAbs().maxCoeff() + 1e-300;
      for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d) {
          const Mat2 e = testing::sym_unit(g, d);
          const SwitchInterval pa = interval(p.a + h * e, p.b, i), ma = interval(p.a - h * e, p.b, i);
          const SwitchInterval pb = interval(p.a, p.b + h * e, i), mb = interval(p.a, p.b - h * e, i);
          const double fa = lower ? (pa.T1 - ma.T1) / (2 * h) : (pa.T2 - ma.T2) / (2 * h);
          const double fb = lower ? (pb.T1 - mb.T1) / (2 * h) : (pb.T2 - mb.T2) / (2 * h);
          worst = std::max({worst, std::abs(fa - U(g, d)) / su, std::abs(fb - V(g, d)) / sv});
        }
    }
  }
  detail::record(rep, "switch interval", "endpoint sensitivities vs FD", worst, 1e-5);
  detail::record(rep, "switch interval", "shortfall of interior endpoint samples",
                 std::max(0, opt.states - interior), 0.5);
}

inline VerifyReport verify_all(const VerifyOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  verify_basis(opt, rep);
  verify_knot_insertion(opt, rep);
  verify_material_tangents(opt, rep);
  verify_global_tangents(opt, rep);
  verify_switch_interval(opt, rep);
  verify_switch_sensitivities(opt, rep);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace klshell
