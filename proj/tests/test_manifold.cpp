#include "lgkit/linalg.hpp"
#include "lgkit/manifold.hpp"
#include "lgkit/metric.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace lgkit;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

std::vector<ManifoldPtr> zoo() {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  auto s1 = std::make_shared<Sphere>(2);
  auto s2 = std::make_shared<Sphere>(3);
  auto so2 = std::make_shared<SpecialOrthogonal>(2);
  auto so3 = std::make_shared<SpecialOrthogonal>(3);
  auto prod = std::make_shared<ProductManifold>(std::vector<ManifoldPtr>{s1, r2});
  // circle cut out of R^2 as a level set
  auto level = std::make_shared<ConstrainedManifold>(
      r2,
      SmoothMap(2, 1, [](const Vec& x) { return Vec::Constant(1, x.squaredNorm() - 1.0); },
                [](const Vec& x) -> Mat { return 2.0 * x.transpose(); }),
      1, "level circle", ManifoldKind::fiber_product,
      [](std::span<const double> u) { return v2(std::cos(2 * std::numbers::pi * u[0]),
                                                std::sin(2 * std::numbers::pi * u[0])); },
      1);
  return {r2, s1, s2, so2, so3, prod, level};
}

}  // namespace

TEST(Manifold, ProjectorIsSymmetricIdempotentWithTraceDim) {
  for (const auto& m : zoo()) {
    for (const Vec& x : sample_points(*m, 200, 7)) {
      ASSERT_TRUE(m->contains(x)) << m->describe();
      const Mat p = m->projector(x);
      EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-10) << m->describe();
      EXPECT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-10) << m->describe();
      EXPECT_NEAR(p.trace(), m->dim(), 1e-10) << m->describe();
    }
  }
}

TEST(Manifold, ChartCentreAndDifferential) {
  for (const auto& m : zoo()) {
    for (const Vec& x : sample_points(*m, 20, 3)) {
      auto chart = m->chart_at(x);
      const Vec zero = Vec::Zero(chart->dim());
      EXPECT_LT((chart->point(zero) - x).norm(), 1e-12) << m->describe();
      const Mat j = chart->jacobian(zero);
      EXPECT_EQ(linalg::numerical_rank(j), m->dim()) << m->describe();
      EXPECT_LT((j - m->tangent_basis(x)).norm(), 1e-10) << m->describe();
      // coords inverts point on a small ball
      Vec u = Vec::Constant(chart->dim(), 0.05);
      EXPECT_LT((chart->coords(chart->point(u)) - u).norm(), 1e-9) << m->describe();
    }
  }
}

TEST(Manifold, ChartJacobianMatchesDifferences) {
  for (const auto& m : zoo()) {
    const Vec x = sample_points(*m, 1, 11).front();
    auto chart = m->chart_at(x);
    const int d = chart->dim();
    Vec u = Vec::Constant(d, 0.1);
    const Mat j = chart->jacobian(u);
    for (int k = 0; k < d; ++k) {
      Vec up = u, um = u;
      up(k) += 1e-6;
      um(k) -= 1e-6;
      const Vec fd = (chart->point(up) - chart->point(um)) / 2e-6;
      EXPECT_LT((fd - j.col(k)).norm(), 1e-7) << m->describe();
    }
  }
}

TEST(Manifold, ProjectionExamples) {
  EuclideanSpace r2(2);
  EXPECT_EQ(r2.project(v2(1, 2), 0.5), v2(1, 2));

  Sphere circle(2);
  EXPECT_LT((circle.project(v2(2, 0), 1.5) - v2(1, 0)).norm(), 1e-15);

  SpecialOrthogonal so2(2);
  Mat a(2, 2);
  a << 1.1, 0.0, 0.0, 0.9;
  const Vec r = so2.project(SpecialOrthogonal::to_vec(a), 0.5);
  EXPECT_LT((SpecialOrthogonal::to_matrix(r, 2) - Mat::Identity(2, 2)).norm(), 1e-14);
}

TEST(Manifold, ProjectionIsIdempotentOnMembers) {
  for (const auto& m : zoo())
    for (const Vec& x : sample_points(*m, 50, 5))
      EXPECT_LT((m->project(x, 0.5) - x).norm(), 1e-10) << m->describe();
}

TEST(Manifold, ProjectionOutsideCaptureRadiusThrows) {
  Sphere circle(2);
  try {
    circle.project(v2(5, 0), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CaptureRadiusExceeded);
  }
}

TEST(Geodesic, FlatLine) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  const Metric g = Metric::euclidean(r2);
  EXPECT_LT((geodesic_exp(g, v2(0, 0), v2(3, 4), 64) - v2(3, 4)).norm(), 1e-12);
}

TEST(Geodesic, QuarterCircle) {
  auto s1 = std::make_shared<Sphere>(2);
  const Metric g = Metric::euclidean(s1);
  const Vec end = geodesic_exp(g, v2(1, 0), v2(0, std::numbers::pi / 2));
  EXPECT_LT((end - v2(0, 1)).norm(), 1e-8);
}

TEST(Geodesic, ZeroVectorIsIdentity) {
  auto s2 = std::make_shared<Sphere>(3);
  const Metric g = Metric::euclidean(s2);
  for (const Vec& x : sample_points(*s2, 20, 1))
    EXPECT_LT((geodesic_exp(g, x, Vec::Zero(3), 10) - x).norm(), 1e-12);
}

TEST(Geodesic, InvalidStepCount) {
  auto s2 = std::make_shared<Sphere>(3);
  const Metric g = Metric::euclidean(s2);
  try {
    geodesic_exp(g, v3(0, 0, 1), v3(1, 0, 0), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepCountInvalid);
  }
}

TEST(Geodesic, FourthOrderOnSphere) {
  auto s2 = std::make_shared<Sphere>(3);
  const Metric g = Metric::euclidean(s2);
  const Vec x = v3(0, 0, 1);
  const Vec v = v3(0.9, 0.6, 0);
  const double len = v.norm();
  const Vec exact = std::cos(len) * x + std::sin(len) * v / len;
  const double e1 = (geodesic_exp(g, x, v, 32) - exact).norm();
  const double e2 = (geodesic_exp(g, x, v, 64) - exact).norm();
  EXPECT_GE(e1 / e2, 12.0);
  EXPECT_LE(e1 / e2, 20.0);
  EXPECT_LT((geodesic_exp(g, x, v) - exact).norm(), 1e-8);
}

TEST(Geodesic, SpeedIsPreserved) {
  auto s2 = std::make_shared<Sphere>(3);
  const Metric g = Metric::euclidean(s2);
  const auto path = geodesic_path(g, v3(0, 0, 1), v3(1.2, -0.4, 0), 128);
  for (double s : path.speeds) EXPECT_NEAR(s, path.speeds.front(), 1e-8);
}

TEST(Submersion, ProjectionOfPlaneIsRiemannian) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  auto r1 = std::make_shared<EuclideanSpace>(1);
  const SmoothMap pr = SmoothMap::block(2, 0, 1);
  const auto rep = riemannian_submersion_check(pr, Metric::euclidean(r2), Metric::euclidean(r1),
                                               sample_points(*r2, 50, 2), 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.max_defect, 1e-14);
}

TEST(Submersion, ScaledBaseFailsBySqrtTwoMinusOne) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  auto r1 = std::make_shared<EuclideanSpace>(1);
  const SmoothMap pr = SmoothMap::block(2, 0, 1);
  const auto rep =
      riemannian_submersion_check(pr, Metric::euclidean(r2),
                                  Metric::scaled(Metric::euclidean(r1), 2.0),
                                  sample_points(*r2, 10, 2), 1e-6);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.max_defect, std::sqrt(2.0) - 1.0, 1e-12);
}

TEST(Submersion, RankDeficientDifferentialThrows) {
  auto r2 = std::make_shared<EuclideanSpace>(2);
  auto r1 = std::make_shared<EuclideanSpace>(1);
  const SmoothMap zero(2, 1, [](const Vec&) { return Vec::Zero(1); },
                       [](const Vec&) -> Mat { return Mat::Zero(1, 2); });
  try {
    submersion_defect(zero, Metric::euclidean(r2), Metric::euclidean(r1), v2(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(Submersion, PushforwardIndependentOfFiberPoint) {
  // Hopf-like radial map from the plane minus origin: polar angle of a
  // point on the cylinder S^1 x R onto S^1, with the product metric.
  auto s1 = std::make_shared<Sphere>(2);
  auto r1 = std::make_shared<EuclideanSpace>(1);
  auto cyl = std::make_shared<ProductManifold>(std::vector<ManifoldPtr>{s1, r1});
  const SmoothMap pr = SmoothMap::block(3, 0, 2);
  const Metric g = Metric::euclidean(cyl);
  const Vec y = v2(0.6, 0.8);
  const Mat ref = pushforward_metric(pr, g, *s1, y, v3(0.6, 0.8, 0.0));
  for (int k = 1; k <= 10; ++k) {
    const Mat other = pushforward_metric(pr, g, *s1, y, v3(0.6, 0.8, 0.7 * k - 3.0));
    EXPECT_LT((other - ref).norm(), 1e-9);
  }
  EXPECT_LT((pushforward_metric(SmoothMap::block(2, 0, 1), Metric::euclidean(std::make_shared<EuclideanSpace>(2)),
                                *r1, Vec::Zero(1), v2(0, 3)) -
             Mat::Identity(1, 1))
                .norm(),
            1e-14);
}
