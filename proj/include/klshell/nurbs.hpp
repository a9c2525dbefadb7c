#pragma once

// Single-patch NURBS surfaces: B-spline basis with second derivatives,
// rational evaluation and knot insertion.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kinematics.hpp"

namespace klshell {

struct NurbsPatch {
  int p = 2, q = 2;
  std::vector<double> U, V;
  int nu = 0, nv = 0;          // control points per direction
  std::vector<Vec3> ctrl;      // index i + nu * j
  std::vector<double> weight;

  int index(int i, int j) const { return i + nu * j; }
  int size() const { return nu * nv; }
  double umin() const { return U[p]; }
  double umax() const { return U[nu]; }
  double vmin() const { return V[q]; }
  double vmax() const { return V[nv]; }

  void validate() const;
};

namespace detail {

inline void check_knots(const std::vector<double>& K, int deg, int n, const char* dir) {
  const std::string d(dir);
  if (deg < 2) throw InvalidDimensions("degree in " + d + " must be at least 2");
  if (static_cast<int>(K.size()) != n + deg + 1) throw InvalidDimensions("knot count mismatch in " + d);
  for (std::size_t k = 1; k < K.size(); ++k)
    if (K[k] < K[k - 1]) throw InvalidDimensions("knots decrease in " + d);
  for (int k = 1; k <= deg; ++k)
    if (K[k] != K[0] || K[K.size() - 1 - k] != K.back()) throw InvalidDimensions("knot vector not open in " + d);
  if (!(K.back() > K.front())) throw InvalidDimensions("empty parameter range in " + d);
  std::size_t k = deg + 1;
  while (k < K.size() - deg - 1) {
    std::size_t m = 1;
    while (k + m < K.size() - deg - 1 && K[k + m] == K[k]) ++m;
    if (static_cast<int>(m) > deg - 1) throw InvalidDimensions("interior knot multiplicity breaks C1 in " + d);
    k += m;
  }
}

// Knot span containing t, with the right end mapped into the last span.
inline int find_span(const std::vector<double>& K, int deg, int n, double t) {
  if (t >= K[n]) return n - 1;
  int lo = deg, hi = n;
  int mid = (lo + hi) / 2;
  while (t < K[mid] || t >= K[mid + 1]) {
    if (t < K[mid]) hi = mid;
    else lo = mid;
    mid = (lo + hi) / 2;
  }
  return mid;
}

// Nonzero basis functions and derivatives up to order 2 at t.
// ders[k][j] is the k-th derivative of N_{span-deg+j}.
inline void basis_ders(const std::vector<double>& K, int deg, int span, double t, double ders[3][8]) {
  double ndu[8][8], left[8], right[8], a[2][8];
  ndu[0][0] = 1.0;
  for (int j = 1; j <= deg; ++j) {
    left[j] = t - K[span + 1 - j];
    right[j] = K[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double tmp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= deg; ++j) ders[0][j] = ndu[j][deg];
  for (int r = 0; r <= deg; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= 2; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = deg - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : deg - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  int f = deg;
  for (int k = 1; k <= 2; ++k) {
    for (int j = 0; j <= deg; ++j) ders[k][j] *= f;
    f *= deg - k;
  }
}

}  // namespace detail

inline void NurbsPatch::validate() const {
  if (nu < p + 1 || nv < q + 1) throw InvalidDimensions("too few control points");
  if (p > 7 || q > 7) throw InvalidDimensions("degree above 7 is not supported");
  detail::check_knots(U, p, nu, "u");
  detail::check_knots(V, q, nv, "v");
  if (static_cast<int>(ctrl.size()) != size() || static_cast<int>(weight.size()) != size())
    throw InvalidDimensions("control net size mismatch");
  for (double w : weight)
    if (!(w > 0.0)) throw InvalidDimensions("weights must be positive");
}

// Rational basis functions that are nonzero at a parameter point.
struct BasisEval {
  std::vector<int> idx;
  std::vector<double> N, Nu, Nv, Nuu, Nuv, Nvv;
};

inline BasisEval basis_eval(const NurbsPatch& P, double u, double v) {
  constexpr double tol = 1e-12;
  const double du = tol * (P.umax() - P.umin()), dv = tol * (P.vmax() - P.vmin());
  if (!(u >= P.umin() - du && u <= P.umax() + du && v >= P.vmin() - dv && v <= P.vmax() + dv))
    throw OutOfDomain("parameter (" + std::to_string(u) + ", " + std::to_string(v) + ") outside patch");
  u = std::clamp(u, P.umin(), P.umax());
  v = std::clamp(v, P.vmin(), P.vmax());
  const int su = detail::find_span(P.U, P.p, P.nu, u);
  const int sv = detail::find_span(P.V, P.q, P.nv, v);
  double bu[3][8], bv[3][8];
  detail::basis_ders(P.U, P.p, su, u, bu);
  detail::basis_ders(P.V, P.q, sv, v, bv);

  const int n = (P.p + 1) * (P.q + 1);
  BasisEval b;
  b.idx.resize(n);
  std::vector<double> B(n), Bu(n), Bv(n), Buu(n), Buv(n), Bvv(n);
  double W = 0, Wu = 0, Wv = 0, Wuu = 0, Wuv = 0, Wvv = 0;
  int k = 0;
  for (int j = 0; j <= P.q; ++j) {
    for (int i = 0; i <= P.p; ++i, ++k) {
      const int g = P.index(su - P.p + i, sv - P.q + j);
      const double w = P.weight[g];
      b.idx[k] = g;
      B[k] = w * bu[0][i] * bv[0][j];
      Bu[k] = w * bu[1][i] * bv[0][j];
      Bv[k] = w * bu[0][i] * bv[1][j];
      Buu[k] = w * bu[2][i] * bv[0][j];
      Buv[k] = w * bu[1][i] * bv[1][j];
      Bvv[k] = w * bu[0][i] * bv[2][j];
      W += B[k];
      Wu += Bu[k];
      Wv += Bv[k];
      Wuu += Buu[k];
      Wuv += Buv[k];
      Wvv += Bvv[k];
    }
  }
  b.N.resize(n);
  b.Nu.resize(n);
  b.Nv.resize(n);
  b.Nuu.resize(n);
  b.Nuv.resize(n);
  b.Nvv.resize(n);
  for (k = 0; k < n; ++k) {
    const double R = B[k] / W;
    const double Ru = (Bu[k] - R * Wu) / W;
    const double Rv = (Bv[k] - R * Wv) / W;
    b.N[k] = R;
    b.Nu[k] = Ru;
    b.Nv[k] = Rv;
    b.Nuu[k] = (Buu[k] - 2.0 * Ru * Wu - R * Wuu) / W;
    b.Nuv[k] = (Buv[k] - Ru * Wv - Rv * Wu - R * Wuv) / W;
    b.Nvv[k] = (Bvv[k] - 2.0 * Rv * Wv - R * Wvv) / W;
  }
  return b;
}

struct SurfaceSample {
  Vec3 x = Vec3::Zero();
  SurfaceDerivs d;
};

// Position and derivatives from a basis evaluation and a point set indexed like the patch.
inline SurfaceSample surface_sample(const BasisEval& b, const std::vector<Vec3>& pts) {
  SurfaceSample s;
  s.d.x1 = s.d.x2 = s.d.x11 = s.d.x12 = s.d.x22 = Vec3::Zero();
  for (std::size_t k = 0; k < b.idx.size(); ++k) {
    const Vec3& P = pts[b.idx[k]];
    s.x += b.N[k] * P;
    s.d.x1 += b.Nu[k] * P;
    s.d.x2 += b.Nv[k] * P;
    s.d.x11 += b.Nuu[k] * P;
    s.d.x12 += b.Nuv[k] * P;
    s.d.x22 += b.Nvv[k] * P;
  }
  return s;
}

inline SurfaceSample evaluate(const NurbsPatch& P, double u, double v) {
  return surface_sample(basis_eval(P, u, v), P.ctrl);
}

namespace detail {

// Boehm insertion of knot t in one direction. The net is viewed as curves
// along that direction; homogeneous coordinates keep the rational geometry.
inline void insert_knot(std::vector<double>& K, int deg, int& n, int n_other, bool along_u,
                        std::vector<Vec3>& ctrl, std::vector<double>& weight, double t) {
  const int span = find_span(K, deg, n, t);
  const int nn = n + 1;
  auto id = [&](int i, int j, int ni) { return along_u ? i + ni * j : j + n_other * i; };
  std::vector<Vec3> nc(static_cast<std::size_t>(nn) * n_other);
  std::vector<double> nw(nc.size());
  for (int j = 0; j < n_other; ++j) {
    for (int i = 0; i < nn; ++i) {
      Eigen::Vector4d Q;
      if (i <= span - deg) {
        const int o = id(i, j, n);
        Q << weight[o] * ctrl[o], weight[o];
      } else if (i > span) {
        const int o = id(i - 1, j, n);
        Q << weight[o] * ctrl[o], weight[o];
      } else {
        const double a = (t - K[i]) / (K[i + deg] - K[i]);
        const int o1 = id(i, j, n), o0 = id(i - 1, j, n);
        Eigen::Vector4d P1, P0;
        P1 << weight[o1] * ctrl[o1], weight[o1];
        P0 << weight[o0] * ctrl[o0], weight[o0];
        Q = a * P1 + (1.0 - a) * P0;
      }
      const int o = id(i, j, nn);
      nw[o] = Q(3);
      nc[o] = Q.head<3>() / Q(3);
    }
  }
  K.insert(K.begin() + span + 1, t);
  n = nn;
  ctrl = std::move(nc);
  weight = std::move(nw);
}

}  // namespace detail

inline void insert_knot_u(NurbsPatch& P, double t) {
  detail::insert_knot(P.U, P.p, P.nu, P.nv, true, P.ctrl, P.weight, t);
}

inline void insert_knot_v(NurbsPatch& P, double t) {
  detail::insert_knot(P.V, P.q, P.nv, P.nu, false, P.ctrl, P.weight, t);
}

// Distinct knot values bounding nonempty spans.
inline std::vector<double> breakpoints(const std::vector<double>& K) {
  std::vector<double> b;
  for (double k : K)
    if (b.empty() || k > b.back()) b.push_back(k);
  return b;
}

inline std::vector<double> open_uniform_knots(int deg, int nel) {
  std::vector<double> K;
  for (int i = 0; i < deg; ++i) K.push_back(0.0);
  for (int e = 0; e <= nel; ++e) K.push_back(static_cast<double>(e) / nel);
  for (int i = 0; i < deg; ++i) K.push_back(1.0);
  return K;
}

// Greville abscissae: parameter images of the control points.
inline std::vector<double> greville(const std::vector<double>& K, int deg, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = 1; k <= deg; ++k) s += K[i + k];
    g[i] = s / deg;
  }
  return g;
}

}  // namespace klshell
