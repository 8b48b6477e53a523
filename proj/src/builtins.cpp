#include "lgkit/builtins.hpp"

#include <cmath>
#include <numbers>

namespace lgkit::builtins {

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }

Vec unit_circle_point(double u) {
  const double th = 2.0 * std::numbers::pi * u;
  return (Vec(2) << std::cos(th), std::sin(th)).finished();
}

}  // namespace

LieGroupoid unit_line() { return build_unit_groupoid(std::make_shared<EuclideanSpace>(1)); }

LieGroupoid pair_line() { return build_pair_groupoid({std::make_shared<EuclideanSpace>(1), false}); }

LieGroupoid pair_circle() { return build_pair_groupoid({std::make_shared<Sphere>(2), true}); }

LieGroupoid plane_projection() {
  SubmersionParams p;
  p.total = std::make_shared<EuclideanSpace>(2);
  p.base = std::make_shared<EuclideanSpace>(1);
  p.pi = SmoothMap::block(2, 0, 1);
  p.fiber_sampler = [](std::span<const double> u, const Vec& x) {
    return (Vec(2) << x(0), 2.0 * u[0] - 1.0).finished();
  };
  p.fiber_sample_dim = 1;
  p.pi_proper = false;
  return build_submersion_groupoid(p);
}

LieGroupoid cylinder_projection() {
  SubmersionParams p;
  auto circle = std::make_shared<Sphere>(2);
  p.total = std::make_shared<ProductManifold>(
      std::vector<ManifoldPtr>{circle, std::make_shared<EuclideanSpace>(1)});
  p.base = std::make_shared<EuclideanSpace>(1);
  p.pi = SmoothMap::block(3, 2, 1);
  p.fiber_sampler = [](std::span<const double> u, const Vec& x) {
    Vec y(3);
    y << unit_circle_point(u[0]), x(2);
    return y;
  };
  p.fiber_sample_dim = 1;
  p.pi_proper = true;
  return build_submersion_groupoid(p);
}

LieGroupoid z2_line() {
  auto line = std::make_shared<EuclideanSpace>(1);
  return build_action_groupoid(std::make_shared<GroupAction>(
      GroupAction::finite_group({Mat::Identity(1, 1), -Mat::Identity(1, 1)}, line)));
}

LieGroupoid trivial_line() {
  auto line = std::make_shared<EuclideanSpace>(1);
  return build_action_groupoid(
      std::make_shared<GroupAction>(GroupAction::finite_group({Mat::Identity(1, 1)}, line)));
}

LieGroupoid so2_plane(int order) {
  auto plane = std::make_shared<EuclideanSpace>(2);
  return build_action_groupoid(
      std::make_shared<GroupAction>(GroupAction::rotations(2, plane, order)));
}

LieGroupoid so3_space(int order) {
  auto space = std::make_shared<EuclideanSpace>(3);
  return build_action_groupoid(
      std::make_shared<GroupAction>(GroupAction::rotations(3, space, order)));
}

SaturatedSubmanifold origin(int n) {
  return make_submanifold(
      std::make_shared<EuclideanSpace>(n), SmoothMap::identity(n), 0, "{0}",
      [n](std::span<const double>) { return Vec::Zero(n).eval(); }, 0);
}

SaturatedSubmanifold unit_circle() {
  return make_submanifold(
      std::make_shared<EuclideanSpace>(2),
      SmoothMap(
          2, 1, [](const Vec& x) { return v1(0.5 * (x.squaredNorm() - 1.0)); },
          [](const Vec& x) -> Mat { return x.transpose(); }),
      1, "S^1", [](std::span<const double> u) { return unit_circle_point(u[0]); }, 1);
}

SaturatedSubmanifold cylinder_fiber(double r0) {
  auto circle = std::make_shared<Sphere>(2);
  auto cyl = std::make_shared<ProductManifold>(
      std::vector<ManifoldPtr>{circle, std::make_shared<EuclideanSpace>(1)});
  return make_submanifold(
      cyl,
      SmoothMap(
          3, 1, [r0](const Vec& x) { return v1(x(2) - r0); },
          [](const Vec&) -> Mat { return (Mat(1, 3) << 0, 0, 1).finished(); }),
      1, "S^1 x {" + std::to_string(r0) + "}",
      [r0](std::span<const double> u) {
        Vec y(3);
        y << unit_circle_point(u[0]), r0;
        return y;
      },
      1);
}

SaturatedSubmanifold plane_fiber(double x0) {
  return make_submanifold(
      std::make_shared<EuclideanSpace>(2),
      SmoothMap(
          2, 1, [x0](const Vec& x) { return v1(x(0) - x0); },
          [](const Vec&) -> Mat { return (Mat(1, 2) << 1, 0).finished(); }),
      1, "{" + std::to_string(x0) + "} x R",
      [x0](std::span<const double> u) { return (Vec(2) << x0, 2.0 * u[0] - 1.0).finished(); }, 1);
}

}  // namespace lgkit::builtins
