#pragma once

// Stress resultants and material tangents of the three shell pipelines:
//   NP  thickness quadrature of the layer kernel
//   AP  closed-form integration of the first-order expansion in xi
//   DD  membrane law plus linear bending with f = T^2/12 c0
//
// Tangent convention: c = 2 dtau/da, d = dtau/db, e = 2 dM0/da, f = dM0/db.

#include <algorithm>
#include <string>

#include "kernels.hpp"
#include "quadrature.hpp"

namespace klshell {

enum class Pipeline { NP, AP, DD };

inline const char* pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::NP: return "np";
    case Pipeline::AP: return "ap";
    case Pipeline::DD: return "dd";
  }
  return "?";
}

inline Pipeline parse_pipeline(const std::string& s) {
  if (s == "np") return Pipeline::NP;
  if (s == "ap") return Pipeline::AP;
  if (s == "dd") return Pipeline::DD;
  throw Error("unknown pipeline '" + s + "'");
}

struct ShellModel {
  Pipeline pipeline = Pipeline::AP;
  int n_gp = 0;  // NP only; 0 selects 2, or 5 with the fiber switch

  int gauss_points(const MaterialSpec& m) const {
    if (n_gp > 0) return n_gp;
    return m.switch_enabled ? 5 : 2;
  }
};

struct StressResultants {
  Mat2 tau = Mat2::Zero();
  Mat2 M0 = Mat2::Zero();
};

struct TangentSet {
  Tensor4 c, d, e, f;
};

struct Resultants {
  StressResultants s;
  TangentSet t;
};

struct SwitchInterval {
  bool empty = true;
  double T1 = 0.0, T2 = 0.0;
  Mat2 U1 = Mat2::Zero(), U2 = Mat2::Zero();
  Mat2 V1 = Mat2::Zero(), V2 = Mat2::Zero();
};

inline Resultants np_resultants(const MaterialSpec& m, const SurfacePointState& s, const ReferencePointState& r,
                                int n_gp) {
  if (n_gp < 1) throw Error("n_gp must be at least 1");
  const GaussRule& g = gauss_legendre(n_gp);
  const double h = 0.5 * m.thickness;
  Resultants out;
  for (int k = 0; k < n_gp; ++k) {
    const double xi = h * g.x[k];
    const double w = h * g.w[k];
    const LayerStress ls = layer_kernel(m, layer_state(s, r, xi));
    out.s.tau += w * ls.tau_star;
    out.s.M0 -= (w * xi) * ls.tau_star;
    out.t.c += w * ls.c_star;
    out.t.d -= (w * xi) * ls.c_star;
    out.t.f += (w * xi * xi) * ls.c_star;
  }
  out.t.e = out.t.d;
  return out;
}

inline Resultants ap_full_resultants(const HatStress& h, double T) {
  const double k3 = -T * T * T / 12.0;
  Resultants out;
  out.s.tau = T * h.tau_hat;
  out.s.M0 = k3 * h.tau_hat_3;
  out.t.c = T * h.c_hat;
  out.t.d = T * h.d_hat;
  out.t.e = k3 * h.c_hat_3;
  out.t.f = k3 * h.d_hat_3;
  return out;
}

inline Resultants ap_full_resultants(const MaterialSpec& m, const SurfacePointState& s, const ReferencePointState& r,
                                     const XiDerivatives& xd) {
  return ap_full_resultants(hat_kernel(m, s, r, xd), m.thickness);
}

// Y = dxi0/da, Z = dxi0/db for xi0 = (1 - I4) / I4_3.
inline std::pair<Mat2, Mat2> switch_sensitivities(double I4, double I4_3, const Mat2& L, const Mat2& L3) {
  const double inv2 = 1.0 / (I4_3 * I4_3);
  return {-inv2 * (I4_3 * L + (1.0 - I4) * L3), 2.0 * inv2 * (1.0 - I4) * L};
}

// Active set {xi in [-T/2, T/2] : I4 + xi I4_3 > 1} and its sensitivities.
inline SwitchInterval switch_interval(double I4, double I4_3, double T, const Mat2& Y, const Mat2& Z) {
  const double h = 0.5 * T;
  SwitchInterval si;
  auto full = [&] {
    si.empty = false;
    si.T1 = -h;
    si.T2 = h;
  };
  if (std::abs(I4_3) * h <= kSwitchTolerance) {
    if (fiber_active(I4)) full();
    return si;
  }
  const double xi0 = (1.0 - I4) / I4_3;
  if (I4_3 > 0.0) {
    if (xi0 <= -h) {
      full();
    } else if (xi0 < h) {
      si.empty = false;
      si.T1 = xi0;
      si.T2 = h;
      si.U1 = Y;
      si.V1 = Z;
    }
  } else {
    if (xi0 >= h) {
      full();
    } else if (xi0 > -h) {
      si.empty = false;
      si.T1 = -h;
      si.T2 = xi0;
      si.U2 = Y;
      si.V2 = Z;
    }
  }
  return si;
}

// GOH with switch: matrix fully stressed, each fiber family integrated
// over its own active interval.
inline Resultants ap_partial_resultants(const MaterialSpec& m, const SurfacePointState& s,
                                        const ReferencePointState& r, const XiDerivatives& xd) {
  if (m.model != Model::GOH || !m.switch_enabled) throw InvalidMaterial("partially-stressed AP requires GOH with switch");
  const double T = m.thickness;
  const detail::Mid q = detail::mid_quantities(s, r, true);
  Resultants out = ap_full_resultants(nh_hat(m.c1, q), T);
  for (std::size_t i = 0; i < m.fibers.size(); ++i) {
    const Mat2& L = r.fibers[i].LL;
    const Mat2& L3 = xd.Lhat_3[i];
    const double I4 = dot(s.a_cov, L);
    const double I43 = xd.I4hat_3[i];
    Mat2 Y = Mat2::Zero(), Z = Mat2::Zero();
    if (std::abs(I43) * 0.5 * T > kSwitchTolerance) std::tie(Y, Z) = switch_sensitivities(I4, I43, L, L3);
    const SwitchInterval si = switch_interval(I4, I43, T, Y, Z);
    if (si.empty) continue;
    const HatStress h = detail::goh_fiber_hat(m.fibers[i], L, L3, I4, I43, q);
    const double T1 = si.T1, T2 = si.T2;
    const double p1 = T2 - T1;
    const double p2 = 0.5 * (T2 * T2 - T1 * T1);
    const double p3 = (T1 * T1 * T1 - T2 * T2 * T2) / 3.0;
    const Mat2 t1 = h.tau_hat + T1 * h.tau_hat_3;
    const Mat2 t2 = h.tau_hat + T2 * h.tau_hat_3;
    out.s.tau += p1 * h.tau_hat + p2 * h.tau_hat_3;
    out.s.M0 += -p2 * h.tau_hat + p3 * h.tau_hat_3;
    out.t.c += p1 * h.c_hat + p2 * h.c_hat_3 + 2.0 * outer(t2, si.U2) - 2.0 * outer(t1, si.U1);
    out.t.d += p1 * h.d_hat + p2 * h.d_hat_3 + outer(t2, si.V2) - outer(t1, si.V1);
    out.t.e += -p2 * h.c_hat + p3 * h.c_hat_3 + 2.0 * T1 * outer(t1, si.U1) - 2.0 * T2 * outer(t2, si.U2);
    out.t.f += -p2 * h.d_hat + p3 * h.d_hat_3 + T1 * outer(t1, si.V1) - T2 * outer(t2, si.V2);
  }
  return out;
}

inline Resultants dd_resultants(const MaterialSpec& m, const SurfacePointState& s, const ReferencePointState& r) {
  const MembraneStress ms = membrane_kernel(m, s, r);
  const double T = m.thickness;
  Resultants out;
  out.s.tau = ms.tau;
  out.t.c = ms.c;
  out.t.f = (T * T / 12.0) * ms.c0;
  out.s.M0 = contract(out.t.f, s.b_cov - r.B_cov);
  return out;
}

inline Resultants shell_resultants(const MaterialSpec& m, const ShellModel& model, const SurfacePointState& s,
                                   const ReferencePointState& r) {
  switch (model.pipeline) {
    case Pipeline::NP: return np_resultants(m, s, r, model.gauss_points(m));
    case Pipeline::AP: {
      const XiDerivatives xd = xi_derivatives(s, r);
      if (m.model == Model::GOH && m.switch_enabled) return ap_partial_resultants(m, s, r, xd);
      return ap_full_resultants(m, s, r, xd);
    }
    case Pipeline::DD: return dd_resultants(m, s, r);
  }
  return {};
}

}  // namespace klshell
