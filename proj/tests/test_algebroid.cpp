#include "lgkit/algebroid.hpp"
#include "lgkit/builtins.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lgkit;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

ActionAlgebroidSection generator() { return ActionAlgebroidSection::constant(Vec::Ones(1), "xi"); }

ActionAlgebroidSection radial() {
  return {"r2", [](const Vec& x) { return Vec::Constant(1, 1.0 + x.squaredNorm()); }};
}

ActionAlgebroidSection wavy() {
  return {"wavy", [](const Vec& x) { return Vec::Constant(1, std::sin(x(0)) * x(1) + 0.3); }};
}

}  // namespace

TEST(Algebroid, UnitGroupoidHasZeroFiber) {
  const auto a = algebroid_at(builtins::unit_line(), Vec::Constant(1, 0.4));
  EXPECT_EQ(a.rank(), 0);
  EXPECT_EQ(a.anchor.cols(), 0);
}

TEST(Algebroid, PairGroupoidAnchorIsIdentity) {
  const auto g = builtins::pair_line();
  const auto a = algebroid_at(g, Vec::Constant(1, -0.7));
  ASSERT_EQ(a.rank(), 1);
  // The kernel generator is the target-factor tangent; dt maps it onto R.
  EXPECT_NEAR(std::abs(a.anchor(0, 0)), 1.0, 1e-8);
  EXPECT_LT((g.source.jacobian(a.unit) * a.basis).norm(), 1e-8);
}

TEST(Algebroid, RotationAnchorIsTangentToOrbit) {
  const auto a = algebroid_at(builtins::so2_plane(), v2(1, 0));
  ASSERT_EQ(a.rank(), 1);
  EXPECT_NEAR(a.anchor(0, 0), 0.0, 1e-8);
  EXPECT_GT(std::abs(a.anchor(1, 0)), 0.1);
}

TEST(Algebroid, FiberDimensionIsArrowsMinusObjects) {
  for (const auto& g : {builtins::pair_line(), builtins::so2_plane(), builtins::cylinder_projection(),
                        builtins::so3_space()}) {
    const auto rep = algebroid_fiber_check(g, 12, 1e-8);
    EXPECT_TRUE(rep.pass) << g.name << " " << rep.max_defect;
  }
}

TEST(Algebroid, AnchorOfGeneratorIsRotationField) {
  const auto g = builtins::so2_plane();
  const Vec r = anchor_of(*g.action, generator(), v2(0.3, 0.5));
  // E = e12 - e21 acts as (x, y) -> (y, -x).
  EXPECT_NEAR(r(0), 0.5, 1e-14);
  EXPECT_NEAR(r(1), -0.3, 1e-14);
}

TEST(Algebroid, LeibnizConstantSectionsConstantFunction) {
  const auto g = builtins::so2_plane();
  const auto rep = leibniz_check(g, generator(), generator(), [](const Vec&) { return 2.0; }, 50);
  EXPECT_TRUE(rep.pass);
  EXPECT_LT(rep.max_defect, 1e-12);
}

TEST(Algebroid, LeibnizGeneratorWithCoordinateFunction) {
  const auto g = builtins::so2_plane();
  const auto rep = leibniz_check(g, generator(), generator(), [](const Vec& x) { return x(0); }, 200);
  EXPECT_EQ(rep.samples, 200u);
  EXPECT_TRUE(rep.pass) << rep.max_defect;
}

TEST(Algebroid, LeibnizNonconstantSections) {
  const auto g = builtins::so3_space();
  const auto a = ActionAlgebroidSection{"a", [](const Vec& x) {
    Vec c(3);
    c << x(0), 1.0, x(1) * x(2);
    return c;
  }};
  const auto b = ActionAlgebroidSection{"b", [](const Vec& x) {
    Vec c(3);
    c << std::cos(x(2)), x(0) * x(1), 0.5;
    return c;
  }};
  const auto rep = leibniz_check(g, a, b, [](const Vec& x) { return std::exp(x(0)) * x(1); }, 100);
  EXPECT_TRUE(rep.pass) << rep.max_defect;
}

TEST(Algebroid, LeibnizDetectsDroppedAnchorTerm) {
  // Residual of the uncorrected identity (without (rho(a) f) b) is not small.
  const auto g = builtins::so2_plane();
  const auto a = generator();
  const auto b = radial();
  const ScalarField f = [](const Vec& x) { return x(0); };
  const auto pts = sample_ball(2, 50, 1.0, 3);
  double worst = 0.0;
  for (const auto& x : pts) {
    const Vec r = section_bracket(*g.action, a, b.scaled(f), x) - f(x) * section_bracket(*g.action, a, b, x);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  EXPECT_GT(worst, 0.1);
}

TEST(Algebroid, BracketIsAntisymmetric) {
  const auto g = builtins::so2_plane();
  const auto rep = antisymmetry_check(g, radial(), wavy(), sample_ball(2, 100, 1.0));
  EXPECT_TRUE(rep.pass) << rep.max_defect;
}

TEST(Algebroid, AnchorIsBracketHomomorphism) {
  const auto g2 = builtins::so2_plane();
  EXPECT_TRUE(anchor_compatibility_check(g2, radial(), wavy(), sample_ball(2, 40, 1.0)).pass);
  const auto g3 = builtins::so3_space();
  const auto a = ActionAlgebroidSection::constant(Vec::Unit(3, 0));
  const auto b = ActionAlgebroidSection::constant(Vec::Unit(3, 2));
  const auto rep = anchor_compatibility_check(g3, a, b, sample_ball(3, 40, 1.0));
  EXPECT_TRUE(rep.pass) << rep.max_defect;
}

TEST(Algebroid, BracketRequiresLieGroupAction) {
  EXPECT_THROW(leibniz_check(builtins::pair_line(), generator(), generator(),
                             [](const Vec&) { return 1.0; }, 5),
               Error);
}
