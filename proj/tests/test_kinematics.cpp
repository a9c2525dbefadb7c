#include <gtest/gtest.h>

#include <cmath>

#include "klshell/kinematics.hpp"
#include "klshell/testing/oracles.hpp"

using namespace klshell;
using klshell::testing::RandomStates;

namespace {

SurfaceDerivs cylinder(double R, double u, double v) {
  (void)v;
  SurfaceDerivs d;
  d.x1 = Vec3(-R * std::sin(u), R * std::cos(u), 0);
  d.x2 = Vec3(0, 0, 1);
  d.x11 = Vec3(-R * std::cos(u), -R * std::sin(u), 0);
  d.x12 = Vec3::Zero();
  d.x22 = Vec3::Zero();
  return d;
}

SurfaceDerivs sphere(double R, double th, double ph) {
  SurfaceDerivs d;
  const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
  d.x1 = R * Vec3(ct * cp, ct * sp, -st);
  d.x2 = R * Vec3(-st * sp, st * cp, 0);
  d.x11 = R * Vec3(-st * cp, -st * sp, -ct);
  d.x12 = R * Vec3(-ct * sp, ct * cp, 0);
  d.x22 = R * Vec3(-st * cp, -st * sp, 0);
  return d;
}

SurfaceDerivs plane() {
  return {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
}

}  // namespace

TEST(SurfacePoint, FlatPlane) {
  const SurfacePointState s = surface_point(plane());
  EXPECT_TRUE(s.a_cov.isApprox(Mat2::Identity()));
  EXPECT_EQ(s.b_cov.norm(), 0.0);
  EXPECT_EQ(s.H_mean, 0.0);
}

TEST(SurfacePoint, CylinderCurvature) {
  const SurfacePointState s = surface_point(cylinder(5.0, 0.3, 0.0));
  // outward normal for this chart: b11 < 0
  EXPECT_NEAR(std::abs(s.b_cov(0, 0) / s.a_cov(0, 0)), 0.2, 1e-14);
  EXPECT_NEAR(std::abs(s.H_mean), 0.1, 1e-14);
}

TEST(SurfacePoint, SphereMeanCurvature) {
  for (double th : {0.3, 1.0, 2.2})
    for (double ph : {0.0, 1.3}) {
      const SurfacePointState s = surface_point(sphere(3.0, th, ph));
      EXPECT_NEAR(std::abs(s.H_mean), 1.0 / 3.0, 1e-13);
    }
}

TEST(SurfacePoint, Invariants) {
  RandomStates rs(11);
  for (int k = 0; k < 50; ++k) {
    SurfaceDerivs d;
    d.x1 = Vec3(1 + rs.uniform(-.3, .3), rs.uniform(-.3, .3), rs.uniform(-.3, .3));
    d.x2 = Vec3(rs.uniform(-.3, .3), 1 + rs.uniform(-.3, .3), rs.uniform(-.3, .3));
    d.x11 = Vec3::Random();
    d.x12 = Vec3::Random();
    d.x22 = Vec3::Random();
    const SurfacePointState s = surface_point(d);
    EXPECT_LT((s.a_cov * s.a_con - Mat2::Identity()).norm(), 1e-12);
    EXPECT_NEAR(s.normal.norm(), 1.0, 1e-12);
    EXPECT_NEAR(s.normal.dot(s.tangents[0]), 0.0, 1e-12);
    EXPECT_NEAR(s.normal.dot(s.tangents[1]), 0.0, 1e-12);
    EXPECT_GT(s.J_area, 0.0);
    EXPECT_NEAR(s.H_mean, 0.5 * dot(s.a_con, s.b_cov), 1e-14);
  }
}

TEST(SurfacePoint, DegenerateTangentsThrow) {
  SurfaceDerivs d = plane();
  d.x2 = 2.0 * d.x1;
  EXPECT_THROW(surface_point(d), DegenerateTangents);
}

TEST(ReferencePoint, FibersUnitInReferenceMetric) {
  SurfaceDerivs d = sphere(2.0, 0.8, 0.4);
  const ReferencePointState r = reference_point(d, {Vec3(1, 0.3, 0.2), Vec3(0, 1, 0)});
  EXPECT_LT((r.A_cov * r.A_con - Mat2::Identity()).norm(), 1e-12);
  for (const auto& f : r.fibers) EXPECT_NEAR(dot(r.A_cov, f.LL), 1.0, 1e-10);
}

TEST(LayerState, MidSurfaceAndFlat) {
  const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero());
  Mat2 a;
  a << 1.3, 0.1, 0.1, 0.9;
  const SurfacePointState s = surface_from_forms(a, Mat2::Zero(), r);
  const LayerState l0 = layer_state(s, r, 0.0);
  EXPECT_EQ(l0.g_cov, s.a_cov);
  EXPECT_NEAR(l0.Jstar, s.J_area, 1e-15);
  const LayerState l1 = layer_state(s, r, 0.05);
  EXPECT_EQ(l1.g_cov, s.a_cov);
}

TEST(LayerState, BentStateSubstitution) {
  const double kappa = 0.7, t = 0.04;
  const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero());
  Mat2 b = Mat2::Zero();
  b(0, 0) = kappa;
  const SurfacePointState s = surface_from_forms(Mat2::Identity(), b, r);
  const LayerState l = layer_state(s, r, t);
  EXPECT_NEAR(l.g_cov(0, 0), 1.0 - 2.0 * t * kappa, 1e-15);
}

TEST(LayerState, FoldedLayerThrows) {
  const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero());
  Mat2 b = Mat2::Zero();
  b(0, 0) = 10.0;
  const SurfacePointState s = surface_from_forms(Mat2::Identity(), b, r);
  EXPECT_THROW(layer_state(s, r, 0.06), DegenerateLayer);
}

TEST(LayerState, MetricTruncationConsistency) {
  RandomStates rs(3);
  const ReferencePointState r = rs.reference(0.3, 0);
  const SurfacePointState s = surface_from_forms(r.A_cov + rs.random_sym(0.1), rs.random_sym(0.5), r);
  const double h = 1e-5;
  const Mat2 dg = (layer_state(s, r, h).g_cov - layer_state(s, r, -h).g_cov) / (2 * h);
  EXPECT_LT((dg + 2.0 * s.b_cov).norm(), 1e-9);
}

TEST(VariationTensors, IdentityValues) {
  const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero());
  const SurfacePointState s = surface_from_forms(Mat2::Identity(), Mat2::Zero(), r);
  const VariationTensors v = variation_tensors(s);
  EXPECT_DOUBLE_EQ(v.a4(0, 0, 0, 0), -1.0);
  EXPECT_DOUBLE_EQ(v.a4(0, 1, 0, 1), -0.5);
  EXPECT_DOUBLE_EQ(v.a4(0, 0, 1, 1), 0.0);
  EXPECT_EQ(v.b4.max_abs(), 0.0);
}

TEST(VariationTensors, SymmetriesAndContraction) {
  RandomStates rs(5);
  for (int k = 0; k < 20; ++k) {
    const ReferencePointState r = rs.reference(0.3, 0);
    const SurfacePointState s = surface_from_forms(rs.random_spd(0.3), rs.random_sym(1.0), r);
    const VariationTensors v = variation_tensors(s);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) {
            EXPECT_EQ(v.a4(a, b, c, d), v.a4(b, a, c, d));
            EXPECT_EQ(v.a4(a, b, c, d), v.a4(a, b, d, c));
          }
    EXPECT_LT((contract(v.a4, s.a_cov) + s.a_con).norm(), 1e-12 * s.a_con.norm());
  }
}

TEST(VariationTensors, CurvatureVariationMatchesFD) {
  RandomStates rs(6);
  for (int k = 0; k < 20; ++k) {
    const Mat2 a = rs.random_spd(0.3);
    const Mat2 b = rs.random_sym(1.0);
    const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero());
    const VariationTensors v = variation_tensors(surface_from_forms(a, b, r));
    const Tensor4 fd = klshell::testing::fd_tensor(
        [&](const Mat2& x) { Mat2 xi = x.inverse(); return Mat2(xi * b * xi); }, a, 1e-6);
    EXPECT_LT(klshell::testing::rel_err(v.b4, fd), 1e-6);
  }
}

TEST(XiDerivatives, MatchLayerFiniteDifferences) {
  RandomStates rs(8);
  const double T = 0.2;
  for (int k = 0; k < 20; ++k) {
    const ReferencePointState r = rs.reference(0.5, 2);
    const SurfacePointState s = surface_from_forms(r.A_cov + rs.random_sym(0.1), r.B_cov + rs.random_sym(0.5), r);
    const XiDerivatives xd = xi_derivatives(s, r);
    const double h = 1e-5 * T;
    const LayerState p = layer_state(s, r, h), m = layer_state(s, r, -h);
    auto rel = [](double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-8); };
    EXPECT_LT(rel(xd.Jhat_3, (p.Jstar - m.Jstar) / (2 * h)), 1e-6);
    EXPECT_LT(rel(xd.I1hat_3, (p.I1 - m.I1) / (2 * h)), 1e-6);
    EXPECT_LT(klshell::testing::rel_err(xd.ghat_con_3, Mat2((p.g_con - m.g_con) / (2 * h))), 1e-6);
    for (int i = 0; i < 2; ++i) {
      EXPECT_LT(klshell::testing::rel_err(xd.Lhat_3[i], Mat2((p.L[i] - m.L[i]) / (2 * h))), 1e-6);
      EXPECT_LT(rel(xd.I4hat_3[i], (p.I4[i] - m.I4[i]) / (2 * h)), 1e-6);
    }
    // reference layers keep unit fiber stretch
    const SurfacePointState s0 = surface_from_forms(r.A_cov, r.B_cov, r);
    for (double xi : {-0.1, 0.03, 0.1})
      for (double i4 : layer_state(s0, r, xi).I4) EXPECT_NEAR(i4, 1.0, 1e-12);
  }
}

TEST(XiDerivatives, FlatAndIdentity) {
  const ReferencePointState flat = reference_from_forms(Mat2::Identity(), Mat2::Zero(), {Vec2(1, 0)});
  Mat2 a;
  a << 1.2, 0.1, 0.1, 0.8;
  const XiDerivatives xd = xi_derivatives(surface_from_forms(a, Mat2::Zero(), flat), flat);
  EXPECT_EQ(xd.Jhat_3, 0.0);
  EXPECT_EQ(xd.I1hat_3, 0.0);
  EXPECT_EQ(xd.ghat_con_3.norm(), 0.0);
  EXPECT_EQ(xd.Lhat_3[0].norm(), 0.0);
  EXPECT_EQ(xd.I4hat_3[0], 0.0);

  Mat2 B = Mat2::Zero();
  B(0, 0) = -0.2;
  const ReferencePointState cyl = reference_from_forms(Mat2::Identity(), B);
  const SurfacePointState s = surface_from_forms(Mat2::Identity(), B, cyl);
  EXPECT_NEAR(s.J_area, 1.0, 1e-15);
  EXPECT_EQ(xi_derivatives(s, cyl).Jhat_3, 0.0);
}

TEST(XiDerivatives, BentFiberSubstitution) {
  const double kappa = 0.3;
  const ReferencePointState r = reference_from_forms(Mat2::Identity(), Mat2::Zero(), {Vec2(1, 0)});
  Mat2 b = Mat2::Zero();
  b(0, 0) = kappa;
  const XiDerivatives xd = xi_derivatives(surface_from_forms(Mat2::Identity(), b, r), r);
  EXPECT_DOUBLE_EQ(xd.I4hat_3[0], -2.0 * kappa);
}
