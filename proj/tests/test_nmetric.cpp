#include "lgkit/builtins.hpp"
#include "lgkit/linalg.hpp"
#include "lgkit/nmetric.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

using namespace lgkit;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Metric exp_line_metric(ManifoldPtr line) {
  return Metric{line, [](const Vec& x) { return Mat::Constant(1, 1, std::exp(x(0))); }, "e^x"};
}

SubmersionMetrics plane_metrics() {
  const LieGroupoid g = builtins::plane_projection();
  return submersion_groupoid_metrics(g, Metric::euclidean(g.objects),
                                     Metric::euclidean(std::make_shared<EuclideanSpace>(1)),
                                     SmoothMap::block(2, 0, 1));
}

SubmersionMetrics cylinder_metrics() {
  const LieGroupoid g = builtins::cylinder_projection();
  return submersion_groupoid_metrics(g, Metric::euclidean(g.objects),
                                     Metric::euclidean(std::make_shared<EuclideanSpace>(1)),
                                     SmoothMap::block(3, 2, 1));
}

double induced_vs_explicit(const LieGroupoid& g, const NMetric& induced, const NMetric& expected,
                           std::size_t count) {
  std::vector<Vec> ys = induced.level == 0 ? sample_points(*g.objects, count, 3)
                                           : sample_nerve(g, induced.level, count, 3);
  double worst = 0.0;
  for (const Vec& y : ys) {
    const Mat b = induced.metric.manifold->tangent_basis(y);
    worst = std::max(worst, linalg::form_defect(b.transpose() * induced.metric.eval(y) * b,
                                                b.transpose() * expected.metric.eval(y) * b));
  }
  return worst;
}

}  // namespace

TEST(SubmersionMetrics, PlaneLevelOneHasUnitWeights) {
  const auto m = plane_metrics();
  // arrow ((x, y1), (x, y2)); coordinate directions x, y1, y2
  const Vec a = vec({0.3, -0.2, 0.3, 0.7});
  Mat c = Mat::Zero(4, 3);
  c(0, 0) = c(2, 0) = 1.0;
  c(1, 1) = 1.0;
  c(3, 2) = 1.0;
  EXPECT_LT((c.transpose() * m.eta1.metric.eval(a) * c - Mat::Identity(3, 3)).norm(), 1e-14);
}

TEST(SubmersionMetrics, PlaneLevelTwoHasUnitWeights) {
  const auto m = plane_metrics();
  // g1 = ((x, p), (x, q)), g2 = ((x, r), (x, p))
  const Vec s = vec({0.1, 0.4, 0.1, -0.5, 0.1, 0.9, 0.1, 0.4});
  Mat c = Mat::Zero(8, 4);
  for (int i : {0, 2, 4, 6}) c(i, 0) = 1.0;
  c(1, 1) = c(7, 1) = 1.0;
  c(3, 2) = 1.0;
  c(5, 3) = 1.0;
  EXPECT_LT((c.transpose() * m.eta2.metric.eval(s) * c - Mat::Identity(4, 4)).norm(), 1e-14);
}

TEST(SubmersionMetrics, ScaledBaseMetricIsRejected) {
  const LieGroupoid g = builtins::plane_projection();
  const auto base = std::make_shared<EuclideanSpace>(1);
  try {
    submersion_groupoid_metrics(g, Metric::euclidean(g.objects),
                                Metric::scaled(Metric::euclidean(base), 2.0),
                                SmoothMap::block(2, 0, 1));
    FAIL() << "expected NotRiemannianSubmersion";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotRiemannianSubmersion);
  }
}

TEST(SubmersionMetrics, AllLevelsVerify) {
  for (auto [g, m] : {std::pair{builtins::plane_projection(), plane_metrics()},
                      std::pair{builtins::cylinder_projection(), cylinder_metrics()}}) {
    for (const NMetric* c : {&m.eta0, &m.eta1, &m.eta2}) {
      const Report r = verify_n_metric(g, *c, 60, 1e-8);
      EXPECT_TRUE(r.pass) << g.name << " level " << c->level << " " << r.details.dump();
      EXPECT_LT(r.max_defect, 1e-8);
    }
  }
}

TEST(SubmersionMetrics, InductionReproducesExplicitFormulas) {
  for (auto [g, m] : {std::pair{builtins::plane_projection(), plane_metrics()},
                      std::pair{builtins::cylinder_projection(), cylinder_metrics()}}) {
    for (int face = 0; face <= 2; ++face) {
      const NMetric one = induce_lower_metric(g, m.eta2, face);
      EXPECT_EQ(one.level, 1);
      EXPECT_LT(induced_vs_explicit(g, one, m.eta1, 20), 1e-8) << g.name << " face " << face;
      EXPECT_LT(one.info["cross_face_agreement"].get<double>(), 1e-8);
      for (int f0 = 0; f0 <= 1; ++f0) {
        const NMetric zero = induce_lower_metric(g, one, f0);
        EXPECT_LT(induced_vs_explicit(g, zero, m.eta0, 20), 1e-8);
      }
    }
  }
}

TEST(VerifyNMetric, InversionThatIsNotAnIsometryFails) {
  const LieGroupoid g = builtins::pair_line();
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 2.0;
  const NMetric bad{1, Metric{g.arrows, [w](const Vec&) { return w; }, "p1 + 2 p2"},
                    MetricProvenance::user, {}};
  const Report r = verify_n_metric(g, bad, 20, 1e-6);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.details["invariance"].get<double>(), 1.0, 1e-12);
}

TEST(AverageMetric, TwoElementAverage) {
  const LieGroupoid g = builtins::z2_line();
  const Metric avg = average_metric(exp_line_metric(g.objects), *g.action, g.action->haar);
  for (double x : {-1.3, 0.0, 0.4, 2.0})
    EXPECT_NEAR(avg.eval(vec({x}))(0, 0), std::cosh(x), 1e-14);
}

TEST(AverageMetric, RotationAverages) {
  const LieGroupoid g = builtins::so2_plane();
  const Metric eu = Metric::euclidean(g.objects);
  Mat d = Mat::Identity(2, 2);
  d(1, 1) = 2.0;
  const Metric diag{g.objects, [d](const Vec&) { return d; }, "diag(1,2)"};
  for (const Vec& x : {vec({0.0, 0.0}), vec({0.3, -0.8})}) {
    EXPECT_LT((average_metric(eu, *g.action, g.action->haar).eval(x) - Mat::Identity(2, 2)).norm(),
              1e-13);
    EXPECT_LT((average_metric(diag, *g.action, g.action->haar).eval(x) - 1.5 * Mat::Identity(2, 2))
                  .norm(),
              1e-13);
  }
}

TEST(AverageMetric, IsIdempotentAndInvariant) {
  const LieGroupoid z2 = builtins::z2_line();
  const Metric once = average_metric(exp_line_metric(z2.objects), *z2.action, z2.action->haar);
  const Metric twice = average_metric(once, *z2.action, z2.action->haar);
  for (double x : {-0.7, 0.2, 1.1})
    EXPECT_NEAR(once.eval(vec({x}))(0, 0), twice.eval(vec({x}))(0, 0), 1e-12);
  EXPECT_LT(action_invariance_defect(once, *z2.action, sample_points(*z2.objects, 10, 1),
                                     z2.action->haar.nodes),
            1e-12);

  const LieGroupoid so2 = builtins::so2_plane();
  const Metric bumpy{so2.objects,
                     [](const Vec& x) {
                       Mat m = Mat::Identity(2, 2);
                       m(0, 0) += x(0) * x(0);
                       m(0, 1) = m(1, 0) = 0.3 * x(1);
                       return m;
                     },
                     "bumpy"};
  const Metric avg = average_metric(bumpy, *so2.action, so2.action->haar);
  std::vector<Vec> elements;
  for (double th : {0.1, 1.0, 2.5}) elements.push_back(GroupAction::vec(
      (Mat(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished()));
  EXPECT_LT(action_invariance_defect(avg, *so2.action, sample_points(*so2.objects, 10, 1), elements),
            1e-12);
}

TEST(AverageMetric, RejectsBadQuadrature) {
  const LieGroupoid g = builtins::z2_line();
  QuadratureRule q = g.action->haar;
  q.weights[0] = 0.7;
  try {
    average_metric(Metric::euclidean(g.objects), *g.action, q);
    FAIL() << "expected QuadratureInvalid";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureInvalid);
  }
}

TEST(GaugeTrick, FiniteGroupIsExact) {
  const LieGroupoid g = builtins::z2_line();
  GaugeTrickOptions opt;
  opt.eta_objects = exp_line_metric(g.objects);
  const NMetric eta2 = build_proper_action_2metric(g, opt);
  EXPECT_EQ(eta2.provenance, MetricProvenance::gauge_trick);
  const Report r = verify_n_metric(g, eta2, 100, 1e-12);
  EXPECT_TRUE(r.pass) << r.details.dump();
}

TEST(GaugeTrick, CircleActionWithinQuadratureTolerance) {
  const auto start = std::chrono::steady_clock::now();
  const LieGroupoid g = builtins::so2_plane(64);
  const NMetric eta2 = build_proper_action_2metric(g);
  const Report r = verify_n_metric(g, eta2, 40, 1e-6);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_TRUE(r.pass) << r.details.dump();
  EXPECT_LT(secs, 60.0);
}

TEST(GaugeTrick, TrivialGroupRecoversInputMetric) {
  const LieGroupoid g = builtins::trivial_line();
  GaugeTrickOptions opt;
  opt.eta_objects = exp_line_metric(g.objects);
  const GaugeTrick gt = gauge_trick(g, opt);
  const NMetric one = induce_lower_metric(g, gt.eta2, 1);
  const NMetric zero = induce_lower_metric(g, one, 0);
  for (double x : {-0.9, 0.0, 0.6}) {
    const Vec p = vec({x});
    const Vec a = g.u(p);
    const Vec s = join_string({a, a});
    for (const auto& [m, pt] : {std::pair{&gt.eta2.metric, s}, std::pair{&one.metric, a},
                                std::pair{&zero.metric, p}}) {
      const Mat b = m->manifold->tangent_basis(pt);
      const Mat db = (b.transpose() * m->eval(pt) * b);
      ASSERT_EQ(db.rows(), 1);
      // the unit tangent vector moves each of the c copies of x by 1 / sqrt(c)
      const double copies = pt.size() == 1 ? 1.0 : static_cast<double>(pt.size()) / 2.0;
      EXPECT_NEAR(db(0, 0) * copies, std::exp(x), 1e-10);
    }
  }
}

TEST(GaugeTrick, InducedOneMetricMakesInversionAnIsometry) {
  const LieGroupoid g = builtins::so2_plane(64);
  const NMetric eta2 = build_proper_action_2metric(g);
  const NMetric one = induce_lower_metric(g, eta2, 0);
  const Report r = verify_n_metric(g, one, 20, 1e-6);
  EXPECT_TRUE(r.pass) << r.details.dump();
  EXPECT_LT(r.details["invariance"].get<double>(), 1e-6);
  const NMetric zero = induce_lower_metric(g, one, 0);
  const Report r0 = verify_n_metric(g, zero, 20, 1e-6);
  EXPECT_TRUE(r0.pass) << r0.details.dump();
}

TEST(GaugeTrick, RejectsGroupoidsWithoutCompactGroup) {
  try {
    build_proper_action_2metric(builtins::pair_line());
    FAIL() << "expected NotCompactGroup";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCompactGroup);
  }
}

TEST(GaugeTrick, TupleMetricMatchesRightTranslationJets) {
  for (const LieGroupoid& g : {builtins::z2_line(), builtins::so2_plane(16)}) {
    const GaugeTrick gt = gauge_trick(g);
    const int na = g.arrows->ambient_dim();
    const int kk = g.action->n * g.action->n;
    const auto& nodes = g.action->haar.nodes;
    const auto& w = g.action->haar.weights;
    for (const Vec& x : sample_nerve(g, 2, 5, 9)) {
      const Vec h = canonical_lift(g, 2, x);
      Mat ref = Mat::Zero(3 * na, 3 * na);
      for (int e = 0; e < 3; ++e) {
        const Vec a = h.segment(e * na, na);
        const Jet in = jet::input(a, 0, na);
        const Jet src = jet::source(g, in);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
          Jet toward{Vec(na), Mat::Zero(na, na)};
          toward.value << g.action->inverse(nodes[i]), src.value;
          toward.jac.bottomRows(na - kk) = src.jac;
          const Jet moved = jet::multiply(g, in, jet::inverse(g, toward));
          ref.block(e * na, e * na, na, na) +=
              w[i] / 3.0 * (moved.jac.transpose() * gt.arrows_metric.eval(moved.value) * moved.jac);
        }
      }
      const Mat b = gt.tuple_metric.manifold->tangent_basis(h);
      EXPECT_LT((b.transpose() * (gt.tuple_metric.eval(h) - ref) * b).norm(), 1e-12) << g.name;
    }
  }
}
