#include "lgkit/builtins.hpp"
#include "lgkit/nerve.hpp"

#include <gtest/gtest.h>

using namespace lgkit;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::vector<LieGroupoid> zoo() {
  return {builtins::unit_line(), builtins::pair_line(),         builtins::pair_circle(),
          builtins::plane_projection(), builtins::cylinder_projection(), builtins::z2_line(),
          builtins::so2_plane(), builtins::so3_space(4)};
}

Mat numeric_jacobian(const std::function<Vec(const Vec&)>& f, const Manifold& m, const Vec& x) {
  auto chart = m.chart_at(x);
  const int d = chart->dim();
  const Vec f0 = f(x);
  Mat j(f0.size(), d);
  for (int k = 0; k < d; ++k) {
    Vec u = Vec::Zero(d);
    u(k) = 1e-6;
    const Vec fp = f(chart->point(u));
    u(k) = -1e-6;
    const Vec fm = f(chart->point(u));
    j.col(k) = (fp - fm) / 2e-6;
  }
  return j;
}

}  // namespace

TEST(Face, MiddleFaceComposes) {
  const auto g = builtins::pair_line();
  const Vec x = vec({1, 2, 0, 1});  // g1 = (1,2), g2 = (0,1)
  EXPECT_EQ(face_map(g, 2, 1, x), vec({0, 2}));
  EXPECT_EQ(face_map(g, 2, 0, x), vec({0, 1}));
  EXPECT_EQ(face_map(g, 2, 2, x), vec({1, 2}));
}

TEST(Face, LevelOneFacesAreSourceAndTarget) {
  const auto g = builtins::pair_line();
  EXPECT_EQ(face_map(g, 1, 0, vec({1, 2})), vec({1}));
  EXPECT_EQ(face_map(g, 1, 1, vec({1, 2})), vec({2}));
}

TEST(Face, IndexOutOfRange) {
  const auto g = builtins::pair_line();
  try {
    face_map(g, 2, 3, vec({1, 2, 0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
  }
  EXPECT_THROW(degeneracy_map(g, 1, 0, vec({1, 2})), Error);
  EXPECT_THROW(degeneracy_map(g, 1, 2, vec({1, 2})), Error);
}

TEST(Degeneracy, InsertsUnitAtSource) {
  const auto g = builtins::pair_line();
  EXPECT_EQ(degeneracy_map(g, 1, 1, vec({1, 2})), vec({1, 2, 1, 1}));
  EXPECT_EQ(degeneracy_map(g, 2, 1, vec({1, 2, 0, 1})), vec({1, 2, 1, 1, 0, 1}));
  EXPECT_EQ(degeneracy_map(g, 2, 2, vec({1, 2, 0, 1})), vec({1, 2, 0, 1, 0, 0}));
}

TEST(Degeneracy, OfIdentityIsIdentities) {
  const auto g = builtins::so2_plane();
  const Vec one = g.u(vec({0.3, -0.2}));
  const Vec d = degeneracy_map(g, 1, 1, one);
  EXPECT_EQ(d, join_string({one, one}));
}

TEST(Symmetric, InvolutionOnPairGroupoid) {
  const auto g = builtins::pair_line();
  const double a = 0.7, b = -1.3, c = 2.1;
  const Vec x = vec({a, b, c, a});
  EXPECT_EQ(sym_action(g, {2, 1, 0}, x), vec({a, c, b, a}));
}

TEST(Symmetric, ThreeCycleClosedForm) {
  const auto g = builtins::pair_line();
  const Vec g1 = vec({0.5, 1.5}), g2 = vec({-1.0, 0.5});
  const Vec x = join_string({g1, g2});
  // ((g1 g2)^{-1}, g1) with g1 g2 = (-1, 1.5)
  EXPECT_EQ(sym_action(g, {1, 2, 0}, x), vec({1.5, -1.0, 0.5, 1.5}));
}

TEST(Symmetric, TranspositionAtLevelOneIsInverse) {
  const auto g = builtins::so2_plane();
  for (const Vec& x : sample_nerve(g, 1, 50, 3)) {
    EXPECT_LT((sym_action(g, {1, 0}, x) - g.inv(x)).norm(), 1e-14);
    EXPECT_LT((sym_action(g, {1, 0}, sym_action(g, {1, 0}, x)) - x).norm(), 1e-12);
  }
}

TEST(Symmetric, ClosedFormsMatchLift) {
  for (const auto& g : zoo())
    for (int n = 1; n <= 2; ++n)
      for (const Vec& x : sample_nerve(g, n, 20, 5))
        for (const auto& s : permutations(n + 1))
          EXPECT_LT((sym_action(g, s, x) - sym_action_lifted(g, s, x)).norm(), 1e-12) << g.name;
}

TEST(Symmetric, LevelThreeIsAnAction) {
  const auto g = builtins::so2_plane();
  const auto perms = permutations(4);
  for (const Vec& x : sample_nerve(g, 3, 5, 5))
    for (std::size_t a = 0; a < perms.size(); a += 5)
      for (std::size_t b = 0; b < perms.size(); b += 7)
        EXPECT_LT((sym_action(g, perms[a], sym_action(g, perms[b], x)) -
                   sym_action(g, compose(perms[a], perms[b]), x))
                      .norm(),
                  1e-10);
}

TEST(Gauge, UnitLiftProjectsToArrow) {
  const auto g = builtins::pair_circle();
  for (const Vec& a : sample_nerve(g, 1, 20, 2)) {
    const Vec h = join_string({a, g.u(g.s(a))});
    EXPECT_LT((gauge_projection(g, 1, h) - a).norm(), 1e-14);
    // transposing projects to the inverse
    const Vec swapped = join_string({g.u(g.s(a)), a});
    EXPECT_LT((gauge_projection(g, 1, swapped) - g.inv(a)).norm(), 1e-14);
  }
}

TEST(Gauge, NotCommonSource) {
  const auto g = builtins::pair_line();
  try {
    gauge_projection(g, 1, vec({0, 1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCommonSource);
  }
}

TEST(Gauge, FibersAreRightOrbits) {
  const auto g = builtins::so2_plane();
  const auto m3 = gauge_space(g, 3);
  for (const Vec& h : sample_points(*m3, 30, 4)) {
    ASSERT_LT(m3->residual(h), 1e-12);
    const Vec src = g.s(h.head(6));
    const Vec k = g.inv(g.arrow_with_source(std::vector<double>{0.37}, src));
    EXPECT_LT((gauge_projection(g, 2, right_translate(g, h, k)) - gauge_projection(g, 2, h)).norm(),
              1e-12);
  }
}

TEST(Simplicial, SuiteOnAllBuiltins) {
  for (const auto& g : zoo()) {
    const Report r = check_simplicial(g, 2, 200, 1e-10);
    EXPECT_TRUE(r.pass) << g.name << " " << r.details.dump();
  }
}

TEST(Nerve, MembershipAndDimension) {
  const auto g = builtins::cylinder_projection();
  for (int n = 0; n <= 3; ++n) {
    const auto m = nerve_space(g, n);
    EXPECT_EQ(m->dim(), n == 0 ? 2 : 2 + n) << n;
    if (n >= 1)
      for (const Vec& x : sample_nerve(g, n, 20, 1)) EXPECT_LT(m->residual(x), 1e-12);
  }
  const auto m2 = nerve_space(g, 2);
  Vec bad = sample_nerve(g, 2, 1, 1).front();
  bad(2) += 0.1;  // breaks the matching condition
  EXPECT_FALSE(m2->contains(bad));
}

TEST(Jet, JacobiansMatchChartDifferences) {
  for (const auto& g : {builtins::so2_plane(), builtins::cylinder_projection(), builtins::so3_space(4)}) {
    const auto m2 = nerve_space(g, 2);
    for (const Vec& x : sample_nerve(g, 2, 3, 8)) {
      const Mat b = m2->tangent_basis(x);
      for (int i = 0; i <= 2; ++i) {
        const Mat an = face_jet(g, 2, i, x).jac * b;
        const Mat fd = numeric_jacobian([&](const Vec& y) { return face_map(g, 2, i, y); }, *m2, x);
        EXPECT_LT((an - fd).norm(), 1e-7) << g.name << " face " << i;
      }
      for (const auto& s : permutations(3)) {
        const Mat an = sym_action_jet(g, s, x).jac * b;
        const Mat fd = numeric_jacobian([&](const Vec& y) { return sym_action(g, s, y); }, *m2, x);
        EXPECT_LT((an - fd).norm(), 1e-7) << g.name;
      }
    }
  }
}
