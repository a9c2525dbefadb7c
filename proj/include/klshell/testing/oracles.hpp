#pragma once

// Independent oracles for verification: condensed scalar energies,
// central finite differences and random admissible states. Not used by the
// solver itself.

#include <functional>
#include <random>

#include "../constitution.hpp"

namespace klshell::testing {

// Condensed strain energy per unit reference volume of one layer.
inline double layer_energy(const MaterialSpec& m, const LayerState& ls) {
  const double J2 = ls.Jstar * ls.Jstar;
  const double I1 = ls.I1;
  const double It1 = I1 + 1.0 / J2;  // tr C with C33 = J*^-2
  switch (m.model) {
    case Model::NH: return 0.5 * m.c1 * (It1 - 3.0);
    case Model::MR:
    case Model::AMR: {
      // I2 = I1/J2 + J2 for incompressible plane stress
      double W = 0.5 * m.c1 * (It1 - 3.0) + 0.5 * m.c2 * (I1 / J2 + J2 - 3.0);
      if (m.model == Model::AMR)
        for (std::size_t i = 0; i < m.fibers.size(); ++i) W += 0.5 * m.fibers[i].c3 * std::pow(ls.I4[i] - 1.0, 2);
      return W;
    }
    case Model::Fung: return m.c1 / (2.0 * m.c2) * (std::exp(m.c2 * (It1 - 3.0)) - 1.0);
    case Model::GOH: {
      double W = 0.5 * m.c1 * (It1 - 3.0);
      for (std::size_t i = 0; i < m.fibers.size(); ++i) {
        if (m.switch_enabled && !fiber_active(ls.I4[i])) continue;
        const auto& f = m.fibers[i];
        const double j = f.kappa * It1 + (1.0 - 3.0 * f.kappa) * ls.I4[i] - 1.0;
        W += f.k1 / (2.0 * f.k2) * (std::exp(f.k2 * j * j) - 1.0);
      }
      return W;
    }
  }
  return 0.0;
}

// Shell energy per unit reference area for the pipelines that derive from a
// potential: thickness quadrature of the layer energy (NP), or membrane energy
// plus the quadratic bending term (DD).
inline double shell_energy(const MaterialSpec& m, const ShellModel& model, const SurfacePointState& s,
                           const ReferencePointState& r) {
  const double T = m.thickness;
  if (model.pipeline == Pipeline::DD) {
    const Tensor4 f = (T * T / 12.0) * reference_tangent(m, r) * T;
    const Mat2 db = s.b_cov - r.B_cov;
    return T * layer_energy(m, layer_state(s, r, 0.0)) + 0.5 * dot(db, contract(f, db));
  }
  if (model.pipeline != Pipeline::NP) throw Error("no potential for this pipeline");
  const int n = model.gauss_points(m);
  const GaussRule& g = gauss_legendre(n);
  double W = 0.0;
  for (int k = 0; k < n; ++k) W += 0.5 * T * g.w[k] * layer_energy(m, layer_state(s, r, 0.5 * T * g.x[k]));
  return W;
}

inline Mat2 sym_unit(int g, int d) {
  Mat2 e = Mat2::Zero();
  e(g, d) += 0.5;
  e(d, g) += 0.5;
  return e;
}

// T(a,b,g,d) = d f^{ab} / d X_gd, symmetric perturbations.
inline Tensor4 fd_tensor(const std::function<Mat2(const Mat2&)>& f, const Mat2& X, double h) {
  Tensor4 t;
  for (int g = 0; g < 2; ++g)
    for (int d = 0; d < 2; ++d) {
      const Mat2 e = sym_unit(g, d);
      const Mat2 df = (f(X + h * e) - f(X - h * e)) / (2.0 * h);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t(a, b, g, d) = df(a, b);
    }
  return t;
}

inline Mat2 fd_gradient(const std::function<double(const Mat2&)>& f, const Mat2& X, double h) {
  Mat2 g;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const Mat2 e = sym_unit(a, b);
      g(a, b) = (f(X + h * e) - f(X - h * e)) / (2.0 * h);
    }
  return g;
}

inline double rel_err(const Tensor4& x, const Tensor4& ref) {
  return (x - ref).max_abs() / std::max(ref.max_abs(), 1e-300);
}

inline double rel_err(const Mat2& x, const Mat2& ref) {
  return (x - ref).cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}

// Error of a tensor against a reference, scaled by a common magnitude.
inline double scaled_err(const Tensor4& x, const Tensor4& ref, double scale) {
  return (x - ref).max_abs() / std::max(scale, 1e-300);
}

struct RandomStates {
  std::mt19937_64 rng;
  explicit RandomStates(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Mat2 random_sym(double amp) {
    Mat2 m;
    m(0, 0) = uniform(-amp, amp);
    m(1, 1) = uniform(-amp, amp);
    m(0, 1) = m(1, 0) = uniform(-amp, amp);
    return m;
  }

  Mat2 random_spd(double amp) {
    Mat2 m = Mat2::Identity();
    m(0, 0) += uniform(-amp, amp);
    m(1, 1) += uniform(-amp, amp);
    m(0, 1) = uniform(-amp, amp);
    m(1, 0) = uniform(-amp, amp);
    return m * m.transpose();
  }

  // Reference point with curvature scale kappa and n fibers.
  ReferencePointState reference(double kappa, int n_fibers) {
    std::vector<Vec2> fib;
    for (int i = 0; i < n_fibers; ++i) {
      const double t = uniform(0.0, 3.14159);
      fib.emplace_back(std::cos(t), std::sin(t));
    }
    return reference_from_forms(random_spd(0.2), random_sym(kappa), fib);
  }
};

}  // namespace klshell::testing

namespace klshell::testing {

struct TangentErrors {
  double c = 0, d = 0, e = 0, f = 0;
  double max() const { return std::max(std::max(c, d), std::max(e, f)); }
};

// Compares the analytic tangent set with central differences of (tau, M0)
// with respect to (a, b). Each error is relative to the FD tensor, floored
// by the natural scale of that tangent (|c| T^k) so vanishing blocks are
// still measured meaningfully.
inline TangentErrors tangent_fd_errors(const MaterialSpec& m, const ShellModel& model, const Mat2& a, const Mat2& b,
                                       const ReferencePointState& r, double h = 1e-6,
                                       const Tensor4* corrupt = nullptr) {
  auto res = [&](const Mat2& aa, const Mat2& bb) { return shell_resultants(m, model, surface_from_forms(aa, bb, r), r); };
  Resultants an = res(a, b);
  if (corrupt) an.t.c += *corrupt;
  const Tensor4 c_fd = 2.0 * fd_tensor([&](const Mat2& x) { return res(x, b).s.tau; }, a, h);
  const Tensor4 d_fd = fd_tensor([&](const Mat2& x) { return res(a, x).s.tau; }, b, h);
  const Tensor4 e_fd = 2.0 * fd_tensor([&](const Mat2& x) { return res(x, b).s.M0; }, a, h);
  const Tensor4 f_fd = fd_tensor([&](const Mat2& x) { return res(a, x).s.M0; }, b, h);
  const double T = m.thickness;
  const double sc = std::max(c_fd.max_abs(), 1e-300);
  auto err = [](const Tensor4& x, const Tensor4& ref, double floor) {
    return (x - ref).max_abs() / std::max(ref.max_abs(), floor);
  };
  TangentErrors e;
  e.c = err(an.t.c, c_fd, 1e-3 * sc);
  e.d = err(an.t.d, d_fd, 1e-3 * sc * T);
  e.e = err(an.t.e, e_fd, 1e-3 * sc * T);
  e.f = err(an.t.f, f_fd, 1e-3 * sc * T * T);
  return e;
}

// Named material configurations exercised by the verification suites.
struct NamedMaterial {
  std::string name;
  MaterialSpec spec;
};

inline std::vector<NamedMaterial> verification_materials(double T) {
  return {
      {"NH", preset(Model::NH, T)},
      {"MR", preset(Model::MR, T)},
      {"Fung", preset(Model::Fung, T)},
      {"AMR", preset(Model::AMR, T, {45.0, -45.0})},
      {"GOH(k=0)", preset(Model::GOH, T, {30.0, -30.0}, 0.0, false)},
      {"GOH(k=0.226)", preset(Model::GOH, T, {30.0, -30.0}, 0.226, false)},
      {"GOH(k=1/3)", preset(Model::GOH, T, {30.0, -30.0}, 1.0 / 3.0, false)},
      {"GOH(k=0,switch)", preset(Model::GOH, T, {30.0, -30.0}, 0.0, true)},
      {"GOH(k=0.226,switch)", preset(Model::GOH, T, {30.0, -30.0}, 0.226, true)},
  };
}

// Random current state near the reference; amplitudes keep the stiff GOH
// exponentials well inside double range.
struct PointSample {
  ReferencePointState r;
  Mat2 a, b;
};

inline PointSample random_point(RandomStates& rs, const MaterialSpec& m) {
  PointSample p;
  std::vector<Vec2> fib;
  const Mat2 A = rs.random_spd(0.15);
  const Mat2 B = rs.random_sym(0.5);
  for (std::size_t i = 0; i < m.fibers.size(); ++i) {
    const double t = rs.uniform(0.0, 3.14159);
    fib.emplace_back(std::cos(t), std::sin(t));
  }
  p.r = reference_from_forms(A, B, fib);
  p.a = p.r.A_cov + rs.random_sym(0.08);
  p.b = p.r.B_cov + rs.random_sym(0.8);
  return p;
}

}  // namespace klshell::testing
