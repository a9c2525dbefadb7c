#pragma once

// Load-stepped Newton-Raphson with increment bisection.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "assembly.hpp"
#include "constraints.hpp"

namespace klshell {

struct StepRecord {
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct NewtonReport {
  std::vector<StepRecord> steps;  // every attempted increment, bisected ones included
  int bisections = 0;
  bool converged = false;
  std::string message;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& msg, NewtonReport r) : Error(msg), report(std::move(r)) {}
  NewtonReport report;
};

struct NewtonOptions {
  int steps = 20;
  int max_iter = 25;
  double tol_abs = 1e-10;  // on the reduced residual norm
  double tol_rel = 1e-10;  // relative to the residual at the start of the increment
  double tol_force = 0.0;  // relative to the reduced internal force; 0 disables
  int max_bisections = 8;
  int line_search = 8;  // max trial evaluations per line search; 0 takes full steps
  bool predictor = true;  // extrapolate the start of each increment
  bool symmetric_solver = false;  // LDLT instead of LU; for provably symmetric tangents only
};

using AssembleFn = std::function<void(const Eigen::VectorXd& u, double lambda, Assembly& out)>;
using StepFn = std::function<void(double lambda, const Eigen::VectorXd& u, const StepRecord& rec)>;

namespace detail {

inline Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& r, bool symmetric) {
  Eigen::VectorXd x;
  if (symmetric) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success) throw SingularTangent("LDLT factorization failed");
    x = ldlt.solve(r);
  } else {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(K);
    if (lu.info() != Eigen::Success) throw SingularTangent("sparse LU factorization failed: " + lu.lastErrorMessage());
    x = lu.solve(r);
  }
  if (!x.allFinite()) throw SingularTangent("linear solve produced non-finite values");
  return x;
}

// Step length along du. For a descent direction the directional derivative
// g(s) = du . r(u + s du) is driven toward zero by Illinois regula falsi on
// [0, 1]; otherwise the residual norm is backtracked. Trial states that throw
// count as overshoot. The step never drops below 2^-line_search.
inline double line_search(const DofMap& dofs, const AssembleFn& assemble, const NewtonOptions& opt, double lambda,
                          const Eigen::VectorXd& u, const Eigen::VectorXd& du, const Eigen::VectorXd& r) {
  if (opt.line_search <= 0) return 1.0;
  const double s_min = std::ldexp(1.0, -opt.line_search);
  const Eigen::VectorXd dur = dofs.reduce(du);
  Eigen::VectorXd rt;
  auto residual = [&](double s) {
    try {
      Assembly t(dofs.size(), false);
      assemble(u + s * du, lambda, t);
      rt = dofs.reduce(t.r);
      return rt.allFinite();
    } catch (const Error&) {
      return false;
    }
  };
  const double g0 = dur.dot(r);
  if (!(g0 < 0.0)) {
    const double rn = r.norm();
    for (double s = 1.0; s > s_min; s *= 0.5)
      if (residual(s) && rt.norm() <= (1.0 - 1e-4 * s) * rn) return s;
    return s_min;
  }
  const double eta = 0.5 * std::abs(g0);
  double s_hi = 1.0;
  while (!residual(s_hi)) {
    s_hi *= 0.5;
    if (s_hi <= s_min) return s_min;
  }
  double g_hi = dur.dot(rt);
  if (g_hi <= eta) return s_hi;
  double s_lo = 0.0, g_lo = g0, best = s_hi, best_g = std::abs(g_hi);
  int side = 0;
  for (int it = 0; it < opt.line_search; ++it) {
    const double s = s_hi - g_hi * (s_hi - s_lo) / (g_hi - g_lo);
    if (!residual(s)) {
      s_hi = s;
      continue;
    }
    const double g = dur.dot(rt);
    if (std::abs(g) < best_g) {
      best = s;
      best_g = std::abs(g);
    }
    if (std::abs(g) <= eta) break;
    if (g < 0.0) {
      s_lo = s;
      g_lo = g;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      s_hi = s;
      g_hi = g;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
  }
  return std::max(best, s_min);
}

// Newton iterations at fixed lambda from u. Returns false on failure and leaves u unspecified.
inline bool newton_at(const DofMap& dofs, const AssembleFn& assemble, const NewtonOptions& opt, double lambda,
                      Eigen::VectorXd& u, StepRecord& rec, std::string& why) {
  rec = StepRecord{lambda, 0, 0.0, false};
  double r0 = -1.0;
  try {
    for (int it = 0; it <= opt.max_iter; ++it) {
      Assembly a(dofs.size(), true);
      assemble(u, lambda, a);
      ++rec.iterations;
      const Eigen::VectorXd r = dofs.reduce(a.r);
      const double rn = r.norm();
      rec.residual = rn;
      if (!std::isfinite(rn)) {
        why = "non-finite residual";
        return false;
      }
      if (r0 < 0.0) r0 = rn;
      const bool balanced = opt.tol_force > 0.0 && a.f_int.size() == a.r.size() &&
                            rn <= opt.tol_force * dofs.reduce(a.f_int).norm();
      if (rn <= opt.tol_abs || rn <= opt.tol_rel * r0 || balanced) {
        rec.converged = true;
        return true;
      }
      if (it == opt.max_iter) break;
      const Eigen::VectorXd du = dofs.expand(linear_solve(dofs.reduce(a.k), -r, opt.symmetric_solver));
      const double step = line_search(dofs, assemble, opt, lambda, u, du, r);
      u += step * du;
    }
    why = "no convergence in " + std::to_string(opt.max_iter) + " iterations";
  } catch (const Error& e) {
    why = e.what();
  }
  return false;
}

}  // namespace detail

// Steps lambda from 0 to 1 in opt.steps equal increments; on_step is called
// after each converged nominal step.
inline NewtonReport newton_solve(const DofMap& dofs, const AssembleFn& assemble, const NewtonOptions& opt,
                                 Eigen::VectorXd& u, const StepFn& on_step = {}) {
  if (opt.steps < 1) throw Error("step count must be at least 1");
  NewtonReport rep;
  if (u.size() != dofs.size()) u = Eigen::VectorXd::Zero(dofs.size());
  double lam = 0.0, lam_prev = 0.0;
  Eigen::VectorXd u_prev = u;
  for (int s = 1; s <= opt.steps; ++s) {
    const double target = static_cast<double>(s) / opt.steps;
    double inc = target - lam;
    int depth = 0;
    while (lam < target) {
      const double next = lam + inc >= target - 1e-12 ? target : lam + inc;
      // Secant predictor from the last two converged states, never extrapolating past one base length.
      Eigen::VectorXd trial = u;
      if (opt.predictor && lam - lam_prev > 1e-9)
        trial += std::min(1.0, (next - lam) / (lam - lam_prev)) * (u - u_prev);
      StepRecord rec;
      std::string why;
      const bool ok = detail::newton_at(dofs, assemble, opt, next, trial, rec, why);
      rep.steps.push_back(rec);
      if (ok) {
        u_prev = u;
        lam_prev = lam;
        u = trial;
        lam = next;
        continue;
      }
      if (depth == opt.max_bisections) {
        rep.message = "load factor " + std::to_string(next) + ": " + why;
        throw NonConvergence(rep.message, rep);
      }
      ++depth;
      ++rep.bisections;
      inc *= 0.5;
    }
    if (on_step) on_step(target, u, rep.steps.back());
  }
  rep.converged = true;
  return rep;
}

}  // namespace klshell
