#pragma once

// Point-wise constitutive kernels. Incompressibility is condensed
// analytically, so every formula below is already in plane-stress form.
//
//   layer_kernel     stress and elasticity at one layer xi  (NP)
//   hat_kernel       mid-surface values and xi-derivatives (AP)
//   membrane_kernel  thickness-scaled membrane law          (DD)

#include <cmath>

#include "kinematics.hpp"
#include "material.hpp"

namespace klshell {

struct LayerStress {
  Mat2 tau_star = Mat2::Zero();
  Tensor4 c_star;
};

struct HatStress {
  Mat2 tau_hat = Mat2::Zero();
  Mat2 tau_hat_3 = Mat2::Zero();
  Tensor4 c_hat, d_hat, c_hat_3, d_hat_3;

  HatStress& operator+=(const HatStress& o) {
    tau_hat += o.tau_hat;
    tau_hat_3 += o.tau_hat_3;
    c_hat += o.c_hat;
    d_hat += o.d_hat;
    c_hat_3 += o.c_hat_3;
    d_hat_3 += o.d_hat_3;
    return *this;
  }
};

struct MembraneStress {
  Mat2 tau = Mat2::Zero();
  Tensor4 c, c0;
};

// Fibers engage only when stretched beyond this roundoff margin, so the
// reference state is classified deterministically.
inline constexpr double kSwitchTolerance = 1e-12;

inline bool fiber_active(double I4) { return I4 > 1.0 + kSwitchTolerance; }

inline double guarded_exp(double x) {
  if (!(x <= 700.0)) throw ConstitutiveOverflow("exponent " + std::to_string(x) + " exceeds 700");
  return std::exp(x);
}

namespace detail {

// GOH scalar functions of J4 - 1.
struct GohScalars {
  double E, D, F;
};

inline GohScalars goh_scalars(double k1, double k2, double j) {
  const double ex = guarded_exp(k2 * j * j);
  return {k1 * j * ex, k1 * (1.0 + 2.0 * k2 * j * j) * ex, 2.0 * k1 * k2 * j * (3.0 + 2.0 * k2 * j * j) * ex};
}

// Normalized neo-Hookean pieces at the mid-surface and their xi-derivatives.
struct Mid {
  Mat2 ai, bc, Ai, Bc;
  double H, dH, J, Jm2, I1, I1_3;
  Mat2 tNH, tNH_3;
  Tensor4 cNH, cNH_3, a4, b4;
};

inline Mid mid_quantities(const SurfacePointState& s, const ReferencePointState& r, bool with_xi) {
  Mid q;
  q.ai = s.a_con;
  q.bc = s.b_con;
  q.Ai = r.A_con;
  q.Bc = r.B_con;
  q.H = s.H_mean;
  q.dH = s.H_mean - r.H0_mean;
  q.J = s.J_area;
  if (!(q.J > 0.0)) throw NonPositiveLayerJacobian("non-positive area stretch");
  q.Jm2 = 1.0 / (q.J * q.J);
  q.I1 = dot(r.A_con, s.a_cov);
  q.tNH = q.Ai - q.Jm2 * q.ai;
  q.a4 = inverse_variation(q.ai);
  q.cNH = 2.0 * q.Jm2 * (outer(q.ai, q.ai) - q.a4);
  if (with_xi) {
    q.b4 = curvature_variation(q.ai, q.bc, q.H);
    q.I1_3 = 2.0 * (dot(s.a_cov, q.Bc) - dot(s.b_cov, q.Ai));
    q.tNH_3 = 2.0 * (q.Bc - q.Jm2 * (q.bc + 2.0 * q.dH * q.ai));
    q.cNH_3 = 4.0 * q.Jm2 * (outer(q.bc, q.ai) + outer(q.ai, q.bc)) + 4.0 * q.dH * q.cNH - 4.0 * q.Jm2 * q.b4;
  }
  return q;
}

// GOH fiber-family contribution to the hat quantities (no switch gating).
inline HatStress goh_fiber_hat(const FiberFamily& f, const Mat2& L, const Mat2& L3, double I4, double I4_3,
                               const Mid& q) {
  HatStress h;
  const double k = f.kappa;
  const double J4 = k * (q.I1 + q.Jm2) + (1.0 - 3.0 * k) * I4;
  const double J4_3 = k * (q.I1_3 + 4.0 * q.dH * q.Jm2) + (1.0 - 3.0 * k) * I4_3;
  const GohScalars g = goh_scalars(f.k1, f.k2, J4 - 1.0);
  const Mat2 R = k * q.tNH + (1.0 - 3.0 * k) * L;
  const Mat2 R3 = k * q.tNH_3 + (1.0 - 3.0 * k) * L3;
  const Mat2 Ja = 2.0 * k * (q.Bc - q.Jm2 * (q.bc + 2.0 * q.dH * q.ai)) + (1.0 - 3.0 * k) * L3;
  const Mat2 Jb = -2.0 * k * q.tNH - 2.0 * (1.0 - 3.0 * k) * L;
  h.tau_hat = 2.0 * g.E * R;
  h.tau_hat_3 = 2.0 * (g.E * R3 + g.D * J4_3 * R);
  h.c_hat = 2.0 * k * g.E * q.cNH + 4.0 * g.D * outer(R, R);
  h.c_hat_3 = 4.0 * (g.D * outer(R3, R) + g.F * J4_3 * outer(R, R) + g.D * outer(R, Ja)) +
              2.0 * k * (g.E * q.cNH_3 + g.D * J4_3 * q.cNH);
  h.d_hat_3 = 2.0 * (g.D * outer(R, Jb) - k * g.E * q.cNH);
  return h;
}

// Mid-surface stress and tangent per unit thickness, without xi terms.
inline void mid_stress(const MaterialSpec& m, const ReferencePointState& r, const SurfacePointState& s, const Mid& q,
                       bool gate_fibers, Mat2& tau, Tensor4& c) {
  const double c1 = m.c1, c2 = m.c2;
  switch (m.model) {
    case Model::NH:
      tau = c1 * q.tNH;
      c = c1 * q.cNH;
      return;
    case Model::MR:
    case Model::AMR: {
      tau = c1 * q.tNH + c2 * q.Jm2 * (q.Ai - q.I1 * q.ai) + c2 / q.Jm2 * q.ai;
      c = (c1 + c2 * q.I1) * q.cNH - 2.0 * c2 * q.Jm2 * (outer(q.Ai, q.ai) + outer(q.ai, q.Ai)) +
          2.0 * c2 / q.Jm2 * (outer(q.ai, q.ai) + q.a4);
      if (m.model == Model::AMR)
        for (std::size_t i = 0; i < m.fibers.size(); ++i) {
          const Mat2& L = r.fibers[i].LL;
          tau += 2.0 * m.fibers[i].c3 * (dot(s.a_cov, L) - 1.0) * L;
          c += 4.0 * m.fibers[i].c3 * outer(L, L);
        }
      return;
    }
    case Model::Fung: {
      const double D1 = c1 * guarded_exp(c2 * (q.I1 + q.Jm2 - 3.0));
      tau = D1 * q.tNH;
      c = D1 * (q.cNH + 2.0 * c2 * outer(q.tNH, q.tNH));
      return;
    }
    case Model::GOH: {
      tau = c1 * q.tNH;
      c = c1 * q.cNH;
      for (std::size_t i = 0; i < m.fibers.size(); ++i) {
        const FiberFamily& f = m.fibers[i];
        const Mat2& L = r.fibers[i].LL;
        const double I4 = dot(s.a_cov, L);
        if (gate_fibers && !fiber_active(I4)) continue;
        const double k = f.kappa;
        const double J4 = k * (q.I1 + q.Jm2) + (1.0 - 3.0 * k) * I4;
        const GohScalars g = goh_scalars(f.k1, f.k2, J4 - 1.0);
        const Mat2 R = k * q.tNH + (1.0 - 3.0 * k) * L;
        tau += 2.0 * g.E * R;
        c += 2.0 * k * g.E * q.cNH + 4.0 * g.D * outer(R, R);
      }
      return;
    }
  }
}

}  // namespace detail

inline LayerStress layer_kernel(const MaterialSpec& m, const LayerState& ls) {
  if (!(ls.Jstar > 0.0)) throw NonPositiveLayerJacobian("non-positive layer Jacobian");
  const Mat2& gi = ls.g_con;
  const Mat2& Gi = ls.G_con;
  const double Jm2 = 1.0 / (ls.Jstar * ls.Jstar);
  const double I1 = ls.I1;
  const Mat2 tNH = Gi - Jm2 * gi;
  const Tensor4 g4 = inverse_variation(gi);
  const Tensor4 cNH = 2.0 * Jm2 * (outer(gi, gi) - g4);
  const double c1 = m.c1, c2 = m.c2;
  LayerStress out;
  switch (m.model) {
    case Model::NH:
      out.tau_star = c1 * tNH;
      out.c_star = c1 * cNH;
      break;
    case Model::MR:
    case Model::AMR:
      out.tau_star = c1 * tNH + c2 * Jm2 * (Gi - I1 * gi) + c2 / Jm2 * gi;
      out.c_star = (c1 + c2 * I1) * cNH - 2.0 * c2 * Jm2 * (outer(Gi, gi) + outer(gi, Gi)) +
                   2.0 * c2 / Jm2 * (g4 + outer(gi, gi));
      if (m.model == Model::AMR)
        for (std::size_t i = 0; i < m.fibers.size(); ++i) {
          out.tau_star += 2.0 * m.fibers[i].c3 * (ls.I4[i] - 1.0) * ls.L[i];
          out.c_star += 4.0 * m.fibers[i].c3 * outer(ls.L[i], ls.L[i]);
        }
      break;
    case Model::Fung: {
      const double D1 = c1 * guarded_exp(c2 * (I1 + Jm2 - 3.0));
      out.tau_star = D1 * tNH;
      out.c_star = D1 * (cNH + 2.0 * c2 * outer(tNH, tNH));
      break;
    }
    case Model::GOH: {
      out.tau_star = c1 * tNH;
      Tensor4 c = c1 * cNH;
      for (std::size_t i = 0; i < m.fibers.size(); ++i) {
        if (m.switch_enabled && !fiber_active(ls.I4[i])) continue;
        const FiberFamily& f = m.fibers[i];
        const double k = f.kappa;
        const double J4 = k * (I1 + Jm2) + (1.0 - 3.0 * k) * ls.I4[i];
        const detail::GohScalars g = detail::goh_scalars(f.k1, f.k2, J4 - 1.0);
        const Mat2 R = k * tNH + (1.0 - 3.0 * k) * ls.L[i];
        out.tau_star += 2.0 * g.E * R;
        c += 2.0 * k * g.E * cNH + 4.0 * g.D * outer(R, R);
      }
      out.c_star = c;
      break;
    }
  }
  return out;
}

// Isotropic (matrix) part of GOH as a neo-Hookean hat with mu~.
inline HatStress nh_hat(double c1, const detail::Mid& q) {
  HatStress h;
  h.tau_hat = c1 * q.tNH;
  h.tau_hat_3 = c1 * q.tNH_3;
  h.c_hat = c1 * q.cNH;
  h.c_hat_3 = c1 * q.cNH_3;
  h.d_hat_3 = -c1 * q.cNH;
  return h;
}

// Hat quantities without switch gating; the partially-stressed GOH case is
// handled in ap_partial_resultants.
inline HatStress hat_kernel(const MaterialSpec& m, const SurfacePointState& s, const ReferencePointState& r,
                            const XiDerivatives& xd) {
  const detail::Mid q = detail::mid_quantities(s, r, true);
  const double c1 = m.c1, c2 = m.c2;
  HatStress h;
  switch (m.model) {
    case Model::NH:
      return nh_hat(c1, q);
    case Model::MR:
    case Model::AMR: {
      h = nh_hat(c1, q);
      const double J2 = 1.0 / q.Jm2;
      const Mat2 tI = q.Jm2 * (4.0 * q.dH * (q.Ai - q.I1 * q.ai) + 2.0 * (q.Bc - q.I1 * q.bc) - q.I1_3 * q.ai);
      const Mat2 tII = 2.0 * J2 * (q.bc - 2.0 * q.dH * q.ai);
      h.tau_hat += c2 * q.Jm2 * (q.Ai - q.I1 * q.ai) + c2 * J2 * q.ai;
      h.tau_hat_3 += c2 * (tI + tII);
      const Tensor4 aa_a4 = outer(q.ai, q.ai) + q.a4;
      const Tensor4 Aa = outer(q.Ai, q.ai) + outer(q.ai, q.Ai);
      h.c_hat = (c1 + c2 * q.I1) * q.cNH - 2.0 * c2 * q.Jm2 * Aa + 2.0 * c2 * J2 * aa_a4;
      h.c_hat_3 += 2.0 * c2 * outer(tII - tI, q.ai) +
                   4.0 * c2 * J2 * (q.b4 + outer(q.ai, q.bc) - 2.0 * q.dH * q.a4) +
                   4.0 * c2 * q.Jm2 *
                       (q.I1 * outer(q.ai, q.bc) - outer(q.Ai, q.bc) - outer(q.ai, q.Bc) -
                        outer(2.0 * q.dH * q.ai + q.bc, q.Ai)) -
                   4.0 * c2 * q.Jm2 * q.I1 * q.b4 - 2.0 * c2 * q.Jm2 * (4.0 * q.dH * q.I1 + q.I1_3) * q.a4;
      h.d_hat_3 += -c2 * q.I1 * q.cNH + 2.0 * c2 * q.Jm2 * Aa - 2.0 * c2 * J2 * aa_a4;
      if (m.model == Model::AMR)
        for (std::size_t i = 0; i < m.fibers.size(); ++i) {
          const double c3 = m.fibers[i].c3;
          const Mat2& L = r.fibers[i].LL;
          const Mat2& L3 = xd.Lhat_3[i];
          const double I4 = dot(s.a_cov, L);
          h.tau_hat += 2.0 * c3 * (I4 - 1.0) * L;
          h.tau_hat_3 += 2.0 * c3 * (xd.I4hat_3[i] * L + (I4 - 1.0) * L3);
          h.c_hat += 4.0 * c3 * outer(L, L);
          h.c_hat_3 += 4.0 * c3 * (outer(L, L3) + outer(L3, L));
          h.d_hat_3 -= 4.0 * c3 * outer(L, L);
        }
      return h;
    }
    case Model::Fung: {
      const double D1 = c1 * guarded_exp(c2 * (q.I1 + q.Jm2 - 3.0));
      const double sxi = q.I1_3 + 4.0 * q.Jm2 * q.dH;
      h.tau_hat = D1 * q.tNH;
      h.tau_hat_3 = D1 * (q.tNH_3 + c2 * sxi * q.tNH);
      h.c_hat = D1 * (q.cNH + 2.0 * c2 * outer(q.tNH, q.tNH));
      h.c_hat_3 = D1 * (q.cNH_3 + c2 * sxi * q.cNH) + 2.0 * c2 * outer(h.tau_hat_3, q.tNH) +
                  4.0 * c2 * D1 * outer(q.tNH, q.Bc - q.Jm2 * (2.0 * q.dH * q.ai + q.bc));
      h.d_hat_3 = -D1 * q.cNH - 2.0 * c2 * D1 * outer(q.tNH, q.tNH);
      return h;
    }
    case Model::GOH: {
      h = nh_hat(c1, q);
      for (std::size_t i = 0; i < m.fibers.size(); ++i)
        h += detail::goh_fiber_hat(m.fibers[i], r.fibers[i].LL, xd.Lhat_3[i], dot(s.a_cov, r.fibers[i].LL),
                                   xd.I4hat_3[i], q);
      return h;
    }
  }
  return h;
}

// Reference membrane tangent per unit thickness (closed forms).
inline Tensor4 reference_tangent(const MaterialSpec& m, const ReferencePointState& r) {
  const Tensor4 cNH0 = 2.0 * (outer(r.A_con, r.A_con) - inverse_variation(r.A_con));
  switch (m.model) {
    case Model::NH:
    case Model::Fung: return m.c1 * cNH0;
    case Model::MR: return (m.c1 + m.c2) * cNH0;
    case Model::AMR: {
      Tensor4 c = (m.c1 + m.c2) * cNH0;
      for (std::size_t i = 0; i < m.fibers.size(); ++i)
        c += 4.0 * m.fibers[i].c3 * outer(r.fibers[i].LL, r.fibers[i].LL);
      return c;
    }
    case Model::GOH: {
      Tensor4 c = m.c1 * cNH0;
      if (!m.switch_enabled)
        for (std::size_t i = 0; i < m.fibers.size(); ++i) {
          const double w = 1.0 - 3.0 * m.fibers[i].kappa;
          c += 4.0 * m.fibers[i].k1 * w * w * outer(r.fibers[i].LL, r.fibers[i].LL);
        }
      return c;
    }
  }
  return cNH0;
}

// Membrane law with c1 = T c~1 (and likewise for every stress-like
// constant); GOH fibers are gated on the mid-surface stretch when the
// switch is enabled.
inline MembraneStress membrane_kernel(const MaterialSpec& m, const SurfacePointState& s, const ReferencePointState& r) {
  const detail::Mid q = detail::mid_quantities(s, r, false);
  MembraneStress out;
  detail::mid_stress(m, r, s, q, m.switch_enabled, out.tau, out.c);
  const double T = m.thickness;
  out.tau *= T;
  out.c *= T;
  out.c0 = T * reference_tangent(m, r);
  return out;
}

}  // namespace klshell
