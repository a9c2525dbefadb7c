#pragma once

// Shell meshes on a single NURBS patch: element quadrature with a cached
// reference state, boundary queries, generators and graded refinement.

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "nurbs.hpp"
#include "quadrature.hpp"

namespace klshell {

struct QuadPoint {
  double u = 0.0, v = 0.0;
  double w = 0.0;  // parametric weight; multiply by dA for the area element
  BasisEval basis;  // ordered like Element::conn
  ReferencePointState ref;
};

struct Element {
  double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
  std::vector<int> conn;
  std::vector<QuadPoint> qp;
};

struct ShellMesh {
  NurbsPatch patch;
  double thickness = 0.0;
  int ngu = 0, ngv = 0;  // 0 selects degree + 1
  std::vector<Vec3> fiber_dirs;
  std::vector<Element> elements;

  int n_ctrl() const { return patch.size(); }
  int n_dof() const { return 3 * patch.size(); }
};

inline ReferencePointState reference_at(const ShellMesh& m, double u, double v) {
  return reference_point(evaluate(m.patch, u, v).d, m.fiber_dirs);
}

// Rebuild elements, basis caches and reference states from the patch.
inline void build_elements(ShellMesh& m) {
  m.patch.validate();
  const int gu = m.ngu > 0 ? m.ngu : m.patch.p + 1;
  const int gv = m.ngv > 0 ? m.ngv : m.patch.q + 1;
  const GaussRule& ru = gauss_legendre(gu);
  const GaussRule& rv = gauss_legendre(gv);
  const std::vector<double> bu = breakpoints(m.patch.U), bv = breakpoints(m.patch.V);
  m.elements.clear();
  for (std::size_t j = 0; j + 1 < bv.size(); ++j) {
    for (std::size_t i = 0; i + 1 < bu.size(); ++i) {
      Element e;
      e.u0 = bu[i];
      e.u1 = bu[i + 1];
      e.v0 = bv[j];
      e.v1 = bv[j + 1];
      const double hu = 0.5 * (e.u1 - e.u0), hv = 0.5 * (e.v1 - e.v0);
      for (int b = 0; b < gv; ++b) {
        for (int a = 0; a < gu; ++a) {
          QuadPoint q;
          q.u = e.u0 + hu * (1.0 + ru.x[a]);
          q.v = e.v0 + hv * (1.0 + rv.x[b]);
          q.w = ru.w[a] * rv.w[b] * hu * hv;
          q.basis = basis_eval(m.patch, q.u, q.v);
          const SurfaceSample s = surface_sample(q.basis, m.patch.ctrl);
          try {
            q.ref = reference_point(s.d, m.fiber_dirs);
          } catch (const DegenerateTangents& ex) {
            throw DegenerateElement(std::string("degenerate reference geometry: ") + ex.what());
          }
          if (e.conn.empty()) e.conn = q.basis.idx;
          e.qp.push_back(std::move(q));
        }
      }
      m.elements.push_back(std::move(e));
    }
  }
}

inline void set_fibers(ShellMesh& m, const std::vector<Vec3>& dirs) {
  m.fiber_dirs = dirs;
  build_elements(m);
}

// ---------------------------------------------------------------- boundary

enum class Edge { umin, umax, vmin, vmax };

inline const char* edge_name(Edge e) {
  switch (e) {
    case Edge::umin: return "umin";
    case Edge::umax: return "umax";
    case Edge::vmin: return "vmin";
    case Edge::vmax: return "vmax";
  }
  return "?";
}

inline std::optional<Edge> parse_edge(const std::string& s) {
  if (s == "umin") return Edge::umin;
  if (s == "umax") return Edge::umax;
  if (s == "vmin") return Edge::vmin;
  if (s == "vmax") return Edge::vmax;
  return std::nullopt;
}

// Control points on an edge (row 0) or on the rows behind it.
inline std::vector<int> edge_nodes(const NurbsPatch& P, Edge e, int row = 0) {
  std::vector<int> out;
  switch (e) {
    case Edge::umin:
      for (int j = 0; j < P.nv; ++j) out.push_back(P.index(row, j));
      break;
    case Edge::umax:
      for (int j = 0; j < P.nv; ++j) out.push_back(P.index(P.nu - 1 - row, j));
      break;
    case Edge::vmin:
      for (int i = 0; i < P.nu; ++i) out.push_back(P.index(i, row));
      break;
    case Edge::vmax:
      for (int i = 0; i < P.nu; ++i) out.push_back(P.index(i, P.nv - 1 - row));
      break;
  }
  return out;
}

// Corner control point from a name such as "umax_vmin".
inline std::optional<int> corner_node(const NurbsPatch& P, const std::string& name) {
  if (name.size() != 9 || name[4] != '_') return std::nullopt;
  const std::string a = name.substr(0, 4), b = name.substr(5);
  if ((a != "umin" && a != "umax") || (b != "vmin" && b != "vmax")) return std::nullopt;
  return P.index(a == "umin" ? 0 : P.nu - 1, b == "vmin" ? 0 : P.nv - 1);
}

struct EdgePoint {
  double u = 0.0, v = 0.0;
  double w = 0.0;  // parametric weight along the edge
  int along = 0;   // parameter running along the edge: 0 = u, 1 = v
  BasisEval basis;
};

inline std::vector<EdgePoint> edge_quadrature(const ShellMesh& m, Edge e, int ng = 0) {
  const NurbsPatch& P = m.patch;
  const bool run_u = e == Edge::vmin || e == Edge::vmax;
  const int n = ng > 0 ? ng : (run_u ? P.p : P.q) + 1;
  const GaussRule& g = gauss_legendre(n);
  const std::vector<double> bp = breakpoints(run_u ? P.U : P.V);
  const double fixed = e == Edge::umin ? P.umin() : e == Edge::umax ? P.umax() : e == Edge::vmin ? P.vmin() : P.vmax();
  std::vector<EdgePoint> out;
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const double h = 0.5 * (bp[s + 1] - bp[s]);
    for (int k = 0; k < n; ++k) {
      EdgePoint p;
      const double t = bp[s] + h * (1.0 + g.x[k]);
      p.u = run_u ? t : fixed;
      p.v = run_u ? fixed : t;
      p.w = g.w[k] * h;
      p.along = run_u ? 0 : 1;
      p.basis = basis_eval(P, p.u, p.v);
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------- generators

namespace detail {

inline NurbsPatch linear_patch(int nel_u, int nel_v) {
  NurbsPatch P;
  P.p = P.q = 2;
  P.U = open_uniform_knots(2, nel_u);
  P.V = open_uniform_knots(2, nel_v);
  P.nu = nel_u + 2;
  P.nv = nel_v + 2;
  P.ctrl.resize(P.size());
  P.weight.assign(P.size(), 1.0);
  return P;
}

inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw InvalidDimensions(std::string(what) + " must be positive");
}

}  // namespace detail

// Flat strip in the xy-plane: width W along x (u), length L along y (v).
inline ShellMesh make_strip(double T, double W, double L, int nel_w, int nel_l) {
  detail::require_positive(T, "thickness");
  detail::require_positive(W, "width");
  detail::require_positive(L, "length");
  if (nel_w < 1 || nel_l < 1) throw InvalidDimensions("element counts must be at least 1");
  ShellMesh m;
  m.thickness = T;
  m.patch = detail::linear_patch(nel_w, nel_l);
  const std::vector<double> gu = greville(m.patch.U, 2, m.patch.nu), gv = greville(m.patch.V, 2, m.patch.nv);
  for (int j = 0; j < m.patch.nv; ++j)
    for (int i = 0; i < m.patch.nu; ++i) m.patch.ctrl[m.patch.index(i, j)] = Vec3(W * gu[i], L * gv[j], 0.0);
  build_elements(m);
  return m;
}

// Square plate [0, L]^2.
inline ShellMesh make_plate(double T, double L, int nel) { return make_strip(T, L, L, nel, nel); }

// Half cylinder of radius R along y. The cross-section interpolates the
// semicircle at the Greville points, so it is C1 but not exactly circular.
inline ShellMesh make_hemitube(double T, double R, double length, int nel_c, int nel_a) {
  detail::require_positive(T, "thickness");
  detail::require_positive(R, "radius");
  detail::require_positive(length, "length");
  if (nel_c < 1 || nel_a < 1) throw InvalidDimensions("element counts must be at least 1");
  ShellMesh m;
  m.thickness = T;
  m.patch = detail::linear_patch(nel_c, nel_a);
  NurbsPatch& P = m.patch;
  const std::vector<double> gu = greville(P.U, 2, P.nu), gv = greville(P.V, 2, P.nv);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(P.nu, P.nu);
  Eigen::MatrixXd rhs(P.nu, 2);
  for (int i = 0; i < P.nu; ++i) {
    const int s = detail::find_span(P.U, 2, P.nu, gu[i]);
    double d[3][8];
    detail::basis_ders(P.U, 2, s, gu[i], d);
    for (int k = 0; k <= 2; ++k) A(i, s - 2 + k) = d[0][k];
    const double phi = std::numbers::pi * gu[i];
    rhs(i, 0) = R * std::cos(phi);
    rhs(i, 1) = R * std::sin(phi);
  }
  const Eigen::MatrixXd c = A.partialPivLu().solve(rhs);
  for (int j = 0; j < P.nv; ++j)
    for (int i = 0; i < P.nu; ++i) P.ctrl[P.index(i, j)] = Vec3(c(i, 0), length * gv[j], c(i, 1));
  build_elements(m);
  return m;
}

// ---------------------------------------------------------------- refinement

// Grading focus in parameter space; a missing coordinate leaves that direction alone.
struct GradingRegion {
  std::optional<double> u, v;
};

namespace detail {

// New knots subdividing each span into round(ratio^(1 - r)) pieces, where r in
// [0, 1] is the normalized distance of the span center from the focus.
inline std::vector<double> graded_knots(const std::vector<double>& K, double focus, double ratio) {
  const std::vector<double> bp = breakpoints(K);
  const std::size_t ne = bp.size() - 1;
  std::vector<double> dist(ne);
  double dmin = 1e300, dmax = -1e300;
  for (std::size_t e = 0; e < ne; ++e) {
    dist[e] = std::abs(0.5 * (bp[e] + bp[e + 1]) - focus);
    dmin = std::min(dmin, dist[e]);
    dmax = std::max(dmax, dist[e]);
  }
  std::vector<double> out;
  for (std::size_t e = 0; e < ne; ++e) {
    const double r = dmax > dmin ? (dist[e] - dmin) / (dmax - dmin) : 0.0;
    const int n = std::max(1, static_cast<int>(std::lround(std::pow(ratio, 1.0 - r))));
    for (int k = 1; k < n; ++k) out.push_back(bp[e] + (bp[e + 1] - bp[e]) * k / n);
  }
  return out;
}

}  // namespace detail

inline ShellMesh graded_refinement(const ShellMesh& mesh, const GradingRegion& region, double ratio) {
  if (!(ratio >= 1.0)) throw InvalidDimensions("grading ratio must be at least 1");
  ShellMesh m = mesh;
  bool changed = false;
  if (region.u)
    for (double t : detail::graded_knots(m.patch.U, *region.u, ratio)) {
      insert_knot_u(m.patch, t);
      changed = true;
    }
  if (region.v)
    for (double t : detail::graded_knots(m.patch.V, *region.v, ratio)) {
      insert_knot_v(m.patch, t);
      changed = true;
    }
  if (changed) build_elements(m);
  return m;
}

// ---------------------------------------------------------------- dump

// Plain-text dump:
//   klshell-mesh 1
//   degree <p> <q>
//   thickness <T>
//   knots_u <n> <values...>
//   knots_v <n> <values...>
//   control <nu> <nv>
//   <x> <y> <z> <w>      one line per control point, u index fastest
inline void write_mesh(std::ostream& os, const ShellMesh& m) {
  const NurbsPatch& P = m.patch;
  os.precision(17);
  os << "klshell-mesh 1\n";
  os << "degree " << P.p << ' ' << P.q << '\n';
  os << "thickness " << m.thickness << '\n';
  os << "knots_u " << P.U.size();
  for (double k : P.U) os << ' ' << k;
  os << "\nknots_v " << P.V.size();
  for (double k : P.V) os << ' ' << k;
  os << "\ncontrol " << P.nu << ' ' << P.nv << '\n';
  for (int k = 0; k < P.size(); ++k)
    os << P.ctrl[k](0) << ' ' << P.ctrl[k](1) << ' ' << P.ctrl[k](2) << ' ' << P.weight[k] << '\n';
}

}  // namespace klshell
