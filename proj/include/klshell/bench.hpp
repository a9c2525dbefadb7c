#pragma once

// Scenario runner: builds the problem, drives the solver and produces the
// monitored curve; pipeline comparisons and parameter sweeps on top.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "problem.hpp"
#include "scenario.hpp"

namespace klshell {

inline ShellMesh build_mesh(const GeometrySpec& g) {
  ShellMesh m;
  if (g.kind == "strip") {
    if (g.quarter) throw InvalidDimensions("quarter models apply to plates only");
    m = make_strip(g.thickness, g.width, g.length, g.nel_u, g.nel_v);
  } else if (g.kind == "plate") {
    const double side = g.quarter ? 0.5 * g.length : g.length;
    m = make_strip(g.thickness, side, side, g.nel_u, g.nel_v);
  } else if (g.kind == "hemitube") {
    m = make_hemitube(g.thickness, g.radius, g.length, g.nel_u, g.nel_v);
  } else {
    throw InvalidDimensions("unknown geometry kind '" + g.kind + "'");
  }
  if (g.grading_ratio > 1.0) m = graded_refinement(m, g.grading, g.grading_ratio);
  return m;
}

inline std::vector<int> target_nodes(const NurbsPatch& P, const std::string& target) {
  if (target == "all") {
    std::vector<int> all(P.size());
    for (int k = 0; k < P.size(); ++k) all[k] = k;
    return all;
  }
  if (auto c = corner_node(P, target)) return {*c};
  if (auto e = parse_edge(target)) return edge_nodes(P, *e);
  throw Error("unknown constraint target '" + target + "'");
}

struct BuiltProblem {
  Problem problem;
  double E = 0.0, T = 0.0, W = 0.0, L = 0.0;
};

inline BuiltProblem build_problem(const Scenario& sc) {
  BuiltProblem b;
  Problem& pb = b.problem;
  pb.setup(build_mesh(sc.geometry), sc.material_spec(), sc.model);
  b.E = pb.material.youngs_modulus();
  b.T = sc.geometry.thickness;
  b.W = sc.geometry.kind == "plate" ? sc.geometry.length : sc.geometry.width;
  b.L = sc.geometry.length;
  const NurbsPatch& P = pb.mesh.patch;
  const ConstraintSpec& k = sc.constraints;
  for (const auto& f : k.fix) fix_nodes(pb.dofs, target_nodes(P, f.target), parse_components(f.comps));
  for (const auto& t : k.tie) tie_nodes(pb.dofs, target_nodes(P, t.target), parse_components(t.comps));
  for (Edge e : k.symmetry) apply_symmetry(pb.dofs, P, e);
  const double eps_r = k.clamp_penalty * b.E * std::pow(b.T, 3);
  for (Edge e : k.clamp) {
    const std::vector<int> en = edge_nodes(P, e);
    const Vec3 tangent = (P.ctrl[en.back()] - P.ctrl[en.front()]).normalized();
    pb.normals.push_back({e, eps_r, tangent, 0.0, k.clamp_free_tilt});
  }

  const LoadSpec& l = sc.load;
  switch (l.kind) {
    case LoadKind::CornerForce: pb.forces.push_back({*corner_node(P, l.corner), l.vec}); break;
    case LoadKind::Pressure: pb.pressures.push_back({l.pressure}); break;
    case LoadKind::EdgeTraction: pb.tractions.push_back({l.edge, l.vec}); break;
    case LoadKind::Rotation: {
      const double f = l.penalty > 0.0 ? l.penalty : 1e3;
      pb.normals.push_back({l.edge, f * b.E * std::pow(b.T, 3), l.axis, l.angle_deg * std::numbers::pi / 180.0,
                            l.free_tilt});
      break;
    }
    case LoadKind::Indenter: {
      if (!(l.radius > 0.0)) throw InvalidDimensions("indenter radius must be positive");
      const double f = l.penalty > 0.0 ? l.penalty : 1e8;
      pb.sphere = Sphere{l.center + Vec3(0, 0, l.radius), Vec3(0, 0, -l.depth), l.radius, f * b.E * b.T};
      break;
    }
  }
  return b;
}

struct RunResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  int control_col = 0, response_col = 0;
  NewtonReport report;
  std::vector<std::string> warnings;
  double seconds = 0.0;

  std::vector<double> column(int c) const {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
};

inline std::vector<std::string> scenario_warnings(const Scenario& sc) {
  std::vector<std::string> w;
  if (sc.model.pipeline == Pipeline::DD && sc.material.model == Model::GOH && sc.material.switch_enabled)
    w.push_back("the dd pipeline cannot capture the switch effect in bending: its bending law uses the reference "
                "tangent with all fibers inactive");
  return w;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

inline Vec3 monitored_displacement(const Problem& pb, const OutputSpec& o, const Eigen::VectorXd& u) {
  const NurbsPatch& P = pb.mesh.patch;
  if (auto c = corner_node(P, o.point)) return u.segment<3>(3 * *c);
  std::istringstream is(o.point);
  double s = 0, t = 0;
  is >> s >> t;
  const BasisEval b = basis_eval(P, s, t);
  Vec3 d = Vec3::Zero();
  for (std::size_t k = 0; k < b.idx.size(); ++k) d += b.N[k] * u.segment<3>(3 * b.idx[k]);
  return d;
}

}  // namespace detail

struct RunOptions {
  std::optional<int> steps;
};

inline RunResult run_scenario(const Scenario& sc, const RunOptions& ro = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  BuiltProblem bp = build_problem(sc);
  const Problem& pb = bp.problem;
  RunResult res;
  res.warnings = scenario_warnings(sc);
  const LoadSpec& l = sc.load;
  const double E = bp.E, T = bp.T, W = bp.W, L = bp.L;
  const double quarter = sc.geometry.quarter ? 4.0 : 1.0;
  const char comp = static_cast<char>('x' + sc.output.component);
  const std::string mon = std::string("u_") + comp + "(" + sc.output.point + ") [mm]";

  std::function<std::vector<double>(double, const Eigen::VectorXd&)> row;
  switch (l.kind) {
    case LoadKind::CornerForce: {
      const double F = l.vec.norm(), EA = E * W * T;
      res.columns = {"load_factor", "F [kPa*mm^2]", "F/(E*A) (E=3c1=" + detail::fmt(E) + " kPa; A=W*T=" +
                     detail::fmt(W * T) + " mm^2)", mon, "u/L (L=" + detail::fmt(L) + " mm)"};
      res.control_col = 2;
      res.response_col = 4;
      row = [&, F, EA](double lam, const Eigen::VectorXd& u) {
        const double d = detail::monitored_displacement(pb, sc.output, u)(sc.output.component);
        return std::vector<double>{lam, lam * F, lam * F / EA, d, d / L};
      };
      break;
    }
    case LoadKind::Rotation: {
      const double EI = E * W * T * T * T / 12.0;
      res.columns = {"load_factor", "alpha [deg]", "M [kPa*mm^3]",
                     "M*L/(E*I) (E=3c1=" + detail::fmt(E) + " kPa; I=W*T^3/12=" + detail::fmt(W * T * T * T / 12) +
                         " mm^4; L=" + detail::fmt(L) + " mm)",
                     mon};
      res.control_col = 1;
      res.response_col = 3;
      const NormalPenalty np = pb.normals.back();
      row = [&, EI, np](double lam, const Eigen::VectorXd& u) {
        const double M = penalty_moment(pb.mesh, current_points(pb.mesh, u), np, lam);
        return std::vector<double>{lam, lam * l.angle_deg, M, M * L / EI,
                                   detail::monitored_displacement(pb, sc.output, u)(sc.output.component)};
      };
      break;
    }
    case LoadKind::Pressure:
    case LoadKind::EdgeTraction: {
      const bool pr = l.kind == LoadKind::Pressure;
      res.columns = {"load_factor", pr ? "p [kPa]" : "t [kPa*mm]", mon, "u/T (T=" + detail::fmt(T) + " mm)"};
      res.control_col = 1;
      res.response_col = 2;
      const double mag = pr ? l.pressure : l.vec.norm();
      row = [&, mag](double lam, const Eigen::VectorXd& u) {
        const double d = detail::monitored_displacement(pb, sc.output, u)(sc.output.component);
        return std::vector<double>{lam, lam * mag, d, d / T};
      };
      break;
    }
    case LoadKind::Indenter: {
      res.columns = {"load_factor", "depth [mm]", "depth/L (L=" + detail::fmt(L) + " mm)",
                     "F [kPa*mm^2] (total contact force" + std::string(quarter > 1 ? ", 4x quarter model" : "") + ")",
                     "F/(E*T*L) (E=3mu=" + detail::fmt(E) + " kPa)"};
      res.control_col = 1;
      res.response_col = 3;
      row = [&, quarter](double lam, const Eigen::VectorXd& u) {
        Assembly a(pb.mesh.n_dof(), false);
        const double F = -quarter * add_contact(pb.mesh, current_points(pb.mesh, u), *pb.sphere, lam, a)(2);
        return std::vector<double>{lam, lam * l.depth, lam * l.depth / L, F, F / (E * T * L)};
      };
      break;
    }
  }

  NewtonOptions opt;
  opt.steps = ro.steps.value_or(sc.stepping.steps);
  opt.max_iter = sc.stepping.max_iter;
  opt.tol_abs = sc.stepping.tol_abs * pb.force_scale();
  opt.tol_rel = sc.stepping.tol_rel;
  opt.tol_force = sc.stepping.tol_force;
  opt.max_bisections = sc.stepping.max_bisections;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(pb.mesh.n_dof());
  res.rows.push_back(row(0.0, u));
  res.report = solve(pb, opt, u, [&](double lam, const Eigen::VectorXd& uu, const StepRecord&) {
    res.rows.push_back(row(lam, uu));
  });
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& cols,
                      const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  os << std::setprecision(12);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

inline void write_report(std::ostream& os, const Scenario& sc, const RunResult& r) {
  os << "scenario: " << sc.name << '\n';
  os << "pipeline: " << pipeline_name(sc.model.pipeline);
  if (sc.model.pipeline == Pipeline::NP) os << " (n_gp = " << sc.model.gauss_points(sc.material_spec()) << ")";
  os << '\n';
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
  os << "converged: " << (r.report.converged ? "yes" : "no") << '\n';
  os << "bisections: " << r.report.bisections << '\n';
  os << "increments:\n";
  os << std::setprecision(6);
  for (const auto& s : r.report.steps)
    os << "  lambda " << s.lambda << "  iterations " << s.iterations << "  residual " << s.residual
       << (s.converged ? "" : "  (failed)") << '\n';
  if (!r.report.message.empty()) os << "message: " << r.report.message << '\n';
}

// Largest pointwise relative deviation of b from the reference a, over rows
// where the reference is not negligible.
inline double max_relative_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double amax = 0.0;
  for (double x : a) amax = std::max(amax, std::abs(x));
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    if (std::abs(a[i]) > 1e-9 * amax) worst = std::max(worst, std::abs(b[i] - a[i]) / std::abs(a[i]));
  return worst;
}

struct CompareResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::vector<double> deviation;  // per model, against the first
  std::vector<RunResult> runs;
};

inline std::string model_label(const ShellModel& m) {
  std::string s = pipeline_name(m.pipeline);
  if (m.pipeline == Pipeline::NP && m.n_gp > 0) s += "(" + std::to_string(m.n_gp) + ")";
  return s;
}

inline CompareResult compare_pipelines(const Scenario& sc, const std::vector<ShellModel>& models,
                                       const RunOptions& ro = {}) {
  if (models.size() < 2) throw Error("compare needs at least two pipelines");
  CompareResult c;
  for (const ShellModel& m : models) {
    Scenario s = sc;
    s.model = m;
    c.runs.push_back(run_scenario(s, ro));
    c.labels.push_back(model_label(m));
  }
  const RunResult& ref = c.runs.front();
  c.columns.push_back(ref.columns[ref.control_col]);
  for (std::size_t i = 0; i < models.size(); ++i) c.columns.push_back(ref.columns[ref.response_col] + " " + c.labels[i]);
  for (std::size_t r = 0; r < ref.rows.size(); ++r) {
    std::vector<double> row{ref.rows[r][ref.control_col]};
    for (const auto& run : c.runs) row.push_back(run.rows[r][run.response_col]);
    c.rows.push_back(row);
  }
  const std::vector<double> a = ref.column(ref.response_col);
  for (const auto& run : c.runs) c.deviation.push_back(max_relative_deviation(a, run.column(run.response_col)));
  return c;
}

enum class SweepAxis { GaussPoints, ThicknessRatio };

struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // axis value, max relative error, final relative error
};

// n_gp sweeps compare NP(n) against AP; thickness sweeps compare AP against NP(5).
inline SweepResult sweep(const Scenario& sc, SweepAxis axis, const std::vector<double>& values,
                         const RunOptions& ro = {}) {
  if (values.size() < 2) throw Error("sweep needs at least two axis values");
  SweepResult out;
  auto final_err = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::abs(b.back() - a.back()) / std::max(std::abs(a.back()), 1e-300);
  };
  if (axis == SweepAxis::GaussPoints) {
    out.columns = {"n_gp", "max_rel_error_vs_ap", "final_rel_error_vs_ap"};
    Scenario s = sc;
    s.model = {Pipeline::AP, 0};
    const RunResult ref = run_scenario(s, ro);
    const std::vector<double> a = ref.column(ref.response_col);
    for (double v : values) {
      s.model = {Pipeline::NP, static_cast<int>(v)};
      if (s.model.n_gp < 1) throw Error("n_gp values must be positive");
      const RunResult r = run_scenario(s, ro);
      const std::vector<double> b = r.column(r.response_col);
      out.rows.push_back({v, max_relative_deviation(a, b), final_err(a, b)});
    }
  } else {
    out.columns = {"T/W", "max_rel_error_ap_vs_np5", "final_rel_error_ap_vs_np5"};
    for (double v : values) {
      if (!(v > 0.0)) throw Error("thickness ratios must be positive");
      Scenario s = sc;
      s.geometry.thickness = v * (sc.geometry.kind == "plate" ? sc.geometry.length : sc.geometry.width);
      s.model = {Pipeline::NP, 5};
      const RunResult ref = run_scenario(s, ro);
      s.model = {Pipeline::AP, 0};
      const RunResult r = run_scenario(s, ro);
      const std::vector<double> a = ref.column(ref.response_col), b = r.column(r.response_col);
      out.rows.push_back({v, max_relative_deviation(a, b), final_err(a, b)});
    }
  }
  return out;
}

}  // namespace klshell
