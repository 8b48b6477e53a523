#include "lgkit/linearize.hpp"

#include "lgkit/linalg.hpp"
#include "lgkit/nerve.hpp"
#include "lgkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ambient Jacobian of f at x that is exact on T_x m (central differences
// along a chart) and zero on the normal directions.
Mat jacobian_along(const Manifold& m, const Vec& x, const std::function<Vec(const Vec&)>& f) {
  auto chart = m.chart_at(x);
  const int d = chart->dim();
  const Mat b = chart->jacobian(Vec::Zero(d));
  const Vec f0 = f(x);
  Mat dk(f0.size(), d);
  for (int k = 0; k < d; ++k) {
    Vec u = Vec::Zero(d);
    u(k) = kFdStep;
    const Vec fp = f(chart->point(u));
    u(k) = -kFdStep;
    const Vec fm = f(chart->point(u));
    dk.col(k) = (fp - fm) / (2.0 * kFdStep);
  }
  return dk * b.transpose();
}

Vec pack2(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

// ------------------------------------------------------------------ normal bundle

Vec NormalBundle::pack(const Vec& x, const Vec& v) { return pack2(x, v); }

Mat NormalBundle::projector(const Vec& x) const {
  const Mat bm = base.parent->tangent_basis(x);
  const Mat gram = linalg::symmetrize(bm.transpose() * eta0.eval(x) * bm);
  const Mat t = bm.transpose() * base.manifold->tangent_basis(x);
  Mat coords = Mat::Identity(bm.cols(), bm.cols());
  if (t.cols() > 0) coords -= t * (t.transpose() * gram * t).ldlt().solve(t.transpose() * gram);
  return bm * coords * bm.transpose();
}

Mat NormalBundle::frame(const Vec& x) const {
  const Mat bm = base.parent->tangent_basis(x);
  const Mat gram = linalg::symmetrize(bm.transpose() * eta0.eval(x) * bm);
  const Mat t = bm.transpose() * base.manifold->tangent_basis(x);
  const Mat y = t.cols() > 0 ? linalg::null_space(t.transpose() * gram)
                             : Mat::Identity(bm.cols(), bm.cols()).eval();
  if (y.cols() == 0) return Mat(x.size(), 0);
  return bm * y * linalg::inv_sqrt_spd(linalg::symmetrize(y.transpose() * gram * y));
}

double NormalBundle::frame_defect(const Vec& x) const {
  const Mat f = frame(x);
  const Mat g = eta0.eval(x);
  double d = (f.transpose() * g * f - Mat::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff();
  const Mat bs = base.manifold->tangent_basis(x);
  if (bs.cols() > 0 && f.cols() > 0) d = std::max(d, (bs.transpose() * g * f).cwiseAbs().maxCoeff());
  return d;
}

NormalBundle build_normal_bundle(const SaturatedSubmanifold& s, const Metric& eta0) {
  NormalBundle nu;
  nu.base = s;
  nu.eta0 = eta0;
  nu.rank = s.parent->dim() - s.manifold->dim();
  const int n = s.parent->ambient_dim();

  auto shared = std::make_shared<NormalBundle>(nu);
  const ManifoldPtr sub = s.manifold;
  const SmoothMap c(
      2 * n, n,
      [shared, n](const Vec& xv) -> Vec {
        const Vec v = xv.tail(n);
        return v - shared->projector(xv.head(n)) * v;
      },
      [shared, sub, n](const Vec& xv) -> Mat {
        const Vec x = xv.head(n), v = xv.tail(n);
        Mat j(n, 2 * n);
        j.leftCols(n) = -jacobian_along(*sub, x, [&](const Vec& y) -> Vec {
          return shared->projector(y) * v;
        });
        j.rightCols(n) = Mat::Identity(n, n) - shared->projector(x);
        return j;
      });
  auto product = std::make_shared<ProductManifold>(
      std::vector<ManifoldPtr>{sub, std::make_shared<EuclideanSpace>(n)});
  const int sd = sub->sample_dim();
  const int r = nu.rank;
  nu.total = std::make_shared<ConstrainedManifold>(
      product, c, sub->dim() + r, "nu(" + sub->describe() + ")", ManifoldKind::vector_bundle,
      [shared, sub, sd, r](std::span<const double> u) -> Vec {
        const Vec x = sub->sample(u.subspan(0, sd));
        Vec coef(r);
        for (int k = 0; k < r; ++k) coef(k) = u[static_cast<std::size_t>(sd + k)] - 0.5;
        return pack2(x, shared->frame(x) * coef);
      },
      sd + r);
  return nu;
}

// ------------------------------------------------------------------ normal representation

namespace {

// N x N matrix L with T_g v = L v for v in nu_{s(g)}.
Mat normal_rep_linear(const LieGroupoid& g, const NormalBundle& nu, const Vec& arrow) {
  const Vec x = g.s(arrow), y = g.t(arrow);
  const Mat bg = g.arrows->tangent_basis(arrow);
  const Mat bm = g.objects->tangent_basis(x);
  const Mat a = bm.transpose() * g.source.jacobian(arrow) * bg;
  if (linalg::numerical_rank(a) < bm.cols())
    throw Error(ErrorCode::LiftFailure, "source differential is not onto at the arrow");
  const Mat lift = bg * linalg::pinv(a) * bm.transpose();
  return nu.projector(y) * g.target.jacobian(arrow) * lift;
}

}  // namespace

Vec normal_rep(const LieGroupoid& g, const NormalBundle& nu, const Vec& arrow, const Vec& v) {
  return normal_rep_linear(g, nu, arrow) * v;
}

Mat normal_rep_matrix(const LieGroupoid& g, const NormalBundle& nu, const Vec& arrow) {
  const Vec x = g.s(arrow), y = g.t(arrow);
  const Mat fy = nu.frame(y);
  return fy.transpose() * nu.eta0.eval(y) * normal_rep_linear(g, nu, arrow) * nu.frame(x);
}

// ------------------------------------------------------------------ linear model

LinearModel linear_model(const LieGroupoid& g, SaturatedSubmanifold s, const Metric& eta0) {
  LinearModel lm;
  lm.restricted = restrict_to_saturated(g, s);
  lm.normal = build_normal_bundle(s, eta0);

  const LieGroupoid big = g;
  const LieGroupoid gs = lm.restricted;
  const auto nu = std::make_shared<NormalBundle>(lm.normal);
  const int n = g.objects->ambient_dim();
  const int na = g.arrows->ambient_dim();
  const int nb = na + n;
  const ManifoldPtr gs_arrows = gs.arrows;

  auto rep = [big, nu](const Vec& a) { return normal_rep_linear(big, *nu, a); };
  auto rep_jac = [gs_arrows, rep, na](const Vec& av) -> Mat {
    const Vec a = av.head(na), v = av.tail(av.size() - na);
    return jacobian_along(*gs_arrows, a, [&](const Vec& b) -> Vec { return rep(b) * v; });
  };

  const SmoothMap c(
      nb, n,
      [big, nu, na, n](const Vec& av) -> Vec {
        const Vec v = av.tail(n);
        return v - nu->projector(big.s(av.head(na))) * v;
      },
      [big, nu, gs_arrows, na, n](const Vec& av) -> Mat {
        const Vec a = av.head(na), v = av.tail(n);
        Mat j(n, na + n);
        j.leftCols(na) = -jacobian_along(*gs_arrows, a, [&](const Vec& b) -> Vec {
          return nu->projector(big.s(b)) * v;
        });
        j.rightCols(n) = Mat::Identity(n, n) - nu->projector(big.s(a));
        return j;
      });
  auto product = std::make_shared<ProductManifold>(
      std::vector<ManifoldPtr>{gs_arrows, std::make_shared<EuclideanSpace>(n)});
  const int sd = gs_arrows->sample_dim();
  const int r = nu->rank;
  auto arrows = std::make_shared<ConstrainedManifold>(
      product, c, gs_arrows->dim() + r, "G_S x nu", ManifoldKind::vector_bundle,
      [big, nu, gs_arrows, sd, r](std::span<const double> u) -> Vec {
        const Vec a = gs_arrows->sample(u.subspan(0, sd));
        Vec coef(r);
        for (int k = 0; k < r; ++k) coef(k) = u[static_cast<std::size_t>(sd + k)] - 0.5;
        return pack2(a, nu->frame(big.s(a)) * coef);
      },
      sd + r);

  LieGroupoid m;
  m.name = "linear_model(" + gs.name + ")";
  m.kind = GroupoidKind::linear_model;
  m.objects = nu->total;
  m.arrows = arrows;
  m.flags = gs.flags;
  m.source = SmoothMap(
      nb, 2 * n, [big, na, n](const Vec& av) { return pack2(big.s(av.head(na)), av.tail(n)); },
      [big, na, n](const Vec& av) -> Mat {
        Mat j = Mat::Zero(2 * n, na + n);
        j.topLeftCorner(n, na) = big.source.jacobian(av.head(na));
        j.bottomRightCorner(n, n).setIdentity();
        return j;
      });
  m.target = SmoothMap(
      nb, 2 * n,
      [big, rep, na, n](const Vec& av) {
        const Vec a = av.head(na);
        return pack2(big.t(a), rep(a) * av.tail(n));
      },
      [big, rep, rep_jac, na, n](const Vec& av) -> Mat {
        const Vec a = av.head(na);
        Mat j = Mat::Zero(2 * n, na + n);
        j.topLeftCorner(n, na) = big.target.jacobian(a);
        j.bottomLeftCorner(n, na) = rep_jac(av);
        j.bottomRightCorner(n, n) = rep(a);
        return j;
      });
  m.unit = SmoothMap(
      2 * n, nb, [big, n](const Vec& xv) { return pack2(big.u(xv.head(n)), xv.tail(n)); },
      [big, na, n](const Vec& xv) -> Mat {
        Mat j = Mat::Zero(na + n, 2 * n);
        j.topLeftCorner(na, n) = big.unit.jacobian(xv.head(n));
        j.bottomRightCorner(n, n).setIdentity();
        return j;
      });
  m.inverse = SmoothMap(
      nb, nb,
      [big, rep, na, n](const Vec& av) {
        const Vec a = av.head(na);
        return pack2(big.inv(a), rep(a) * av.tail(n));
      },
      [big, rep, rep_jac, na, n](const Vec& av) -> Mat {
        const Vec a = av.head(na);
        Mat j = Mat::Zero(na + n, na + n);
        j.topLeftCorner(na, na) = big.inverse.jacobian(a);
        j.bottomLeftCorner(n, na) = rep_jac(av);
        j.bottomRightCorner(n, n) = rep(a);
        return j;
      });
  m.multiply = SmoothMap(
      2 * nb, nb,
      [big, na, n, nb](const Vec& p) {
        return pack2(big.compose_unchecked(p.head(na), p.segment(nb, na)), p.tail(n));
      },
      [big, na, n, nb](const Vec& p) -> Mat {
        const Mat jm = big.multiply.jacobian(pack2(p.head(na), p.segment(nb, na)));
        Mat j = Mat::Zero(nb, 2 * nb);
        j.block(0, 0, na, na) = jm.leftCols(na);
        j.block(0, nb, na, na) = jm.rightCols(na);
        j.block(na, nb + na, n, n).setIdentity();
        return j;
      });
  const auto fiber = gs.arrow_with_source;
  m.arrow_with_source = [fiber, n](std::span<const double> u, const Vec& xv) -> Vec {
    return pack2(fiber(u, xv.head(n)), xv.tail(n));
  };
  m.fiber_sample_dim = gs.fiber_sample_dim;
  lm.groupoid = std::move(m);
  return lm;
}

// ------------------------------------------------------------------ saturated neighborhoods

SaturatedNeighborhood saturate_neighborhood(const LieGroupoid& g, const SaturatedSubmanifold& s,
                                            double radius, std::size_t samples,
                                            std::uint64_t seed) {
  if (!g.flags.s_proper)
    throw Error(ErrorCode::NotSProper, g.name + " is not declared s-proper");
  const LieGroupoid copy = g;
  const SaturatedSubmanifold sub = s;
  SaturatedNeighborhood out;
  out.radius = radius;
  out.contains = [copy, sub, radius, seed](const Vec& x) {
    for (const Vec& y : orbit_sample(copy, x, 64, seed))
      if (sub.distance(y) < radius) return true;
    return false;
  };

  // Points scattered in the 2 * radius tube; every orbit point must share
  // the membership of its base point.
  const int m = g.objects->dim();
  const LowDiscrepancy seq(s.manifold->sample_dim() + m, seed + 3);
  std::vector<double> defects;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto u = seq.point(i);
    const Vec p = s.manifold->sample(std::span<const double>(u).subspan(0, s.manifold->sample_dim()));
    Vec c(m);
    for (int k = 0; k < m; ++k)
      c(k) = (2.0 * u[static_cast<std::size_t>(s.manifold->sample_dim() + k)] - 1.0) * 2.0 * radius;
    const Vec x = g.objects->project(p + g.objects->tangent_basis(p) * c, kInf);
    const bool inside = out.contains(x);
    double d = 0.0;
    for (const Vec& y : orbit_sample(g, x, 16, seed + i))
      if (out.contains(y) != inside) d = 1.0;
    defects.push_back(d);
  }
  out.certificate = Report::from_defects("saturate_neighborhood", std::move(defects), 0.5);
  out.certificate.details["radius"] = radius;
  return out;
}

// ------------------------------------------------------------------ exponential maps

Vec LinearizationResult::exp0(const Vec& x, const Vec& v) const {
  return geodesic_exp(eta0, x, v, default_step_count(eta0, x, v, geodesic), geodesic);
}

Vec LinearizationResult::arrow_normal(const Vec& arrow, const Vec& v) const {
  const Mat bg = groupoid.arrows->tangent_basis(arrow);
  const Mat p = normal().projector(groupoid.s(arrow));
  const Mat a = p * groupoid.source.jacobian(arrow) * bg;
  // T_g G_S = ds^{-1}(T S); its eta1-orthogonal complement maps onto nu.
  const Mat along = linalg::null_space(a);
  const Mat gram = linalg::symmetrize(bg.transpose() * eta1.eval(arrow) * bg);
  const Mat across = along.cols() == 0 ? Mat::Identity(bg.cols(), bg.cols()).eval()
                                       : linalg::null_space(along.transpose() * gram);
  const Mat onto = a * across;
  if (linalg::numerical_rank(onto) < normal().rank)
    throw Error(ErrorCode::LiftFailure, "normal space of G_S does not cover nu");
  return bg * across * linalg::pinv(onto) * v;
}

Vec LinearizationResult::exp1(const Vec& arrow, const Vec& v) const {
  const Vec w = arrow_normal(arrow, v);
  return geodesic_exp(eta1, arrow, w, default_step_count(eta1, arrow, w, geodesic), geodesic);
}

nlohmann::json LinearizationResult::to_json() const {
  nlohmann::json j;
  j["groupoid"] = groupoid.name;
  j["submanifold"] = normal().base.manifold->describe();
  j["normal_rank"] = normal().rank;
  j["radius"] = radius;
  j["injectivity_ratio"] = injectivity_ratio;
  j["eta1"] = eta1.name;
  j["eta0"] = eta0.name;
  j["linearization"] = saturated ? "invariant" : "weak";
  if (saturated) j["saturated_neighborhood"] = saturated->certificate.to_json();
  return j;
}

namespace {

struct ProbeSample {
  Vec x;
  Vec v;
};

std::vector<ProbeSample> normal_samples(const NormalBundle& nu, double radius, std::size_t count,
                                        std::uint64_t seed) {
  const int sd = nu.base.manifold->sample_dim();
  const LowDiscrepancy seq(sd + nu.rank, seed);
  const double scale = nu.rank > 0 ? radius / std::sqrt(static_cast<double>(nu.rank)) : 0.0;
  std::vector<ProbeSample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = seq.point(i);
    const Vec x = nu.base.manifold->sample(std::span<const double>(u).subspan(0, sd));
    Vec c(nu.rank);
    for (int k = 0; k < nu.rank; ++k)
      c(k) = (2.0 * u[static_cast<std::size_t>(sd + k)] - 1.0) * scale;
    out.push_back({x, nu.frame(x) * c});
  }
  return out;
}

double separation_ratio(const std::vector<Vec>& pre, const std::vector<Vec>& img) {
  double worst = kInf;
  for (std::size_t i = 0; i < pre.size(); ++i)
    for (std::size_t j = i + 1; j < pre.size(); ++j) {
      const double d = (pre[i] - pre[j]).norm();
      if (d < 1e-12) continue;
      worst = std::min(worst, (img[i] - img[j]).norm() / d);
    }
  return worst;
}

double probe_ratio(const NormalBundle& nu, const Metric& eta0, double radius,
                   const LinearizeOptions& opt) {
  GeodesicOptions geo = opt.geodesic;
  geo.steps_per_unit = opt.probe_steps_per_unit;
  const auto samples = normal_samples(nu, radius, opt.probe_samples, opt.seed + 101);
  auto img = sample_map(samples.size(), [&](std::size_t i) {
    const auto& p = samples[i];
    return geodesic_exp(eta0, p.x, p.v, default_step_count(eta0, p.x, p.v, geo), geo);
  });
  std::vector<Vec> pre;
  for (const auto& p : samples) pre.push_back(pack2(p.x, p.v));
  return separation_ratio(pre, img);
}

}  // namespace

double injectivity_estimate(const NormalBundle& nu, const Metric& eta0, double r_max,
                            const LinearizeOptions& opt) {
  if (probe_ratio(nu, eta0, r_max, opt) >= opt.injectivity_floor) return r_max;
  double lo = 0.0, hi = r_max;
  for (int i = 0; i < opt.bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (probe_ratio(nu, eta0, mid, opt) >= opt.injectivity_floor)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

LinearizationResult linearize_exp(const LieGroupoid& g, const NMetric& eta2,
                                  SaturatedSubmanifold s, double radius,
                                  const LinearizeOptions& opt) {
  if (eta2.level != 2) throw Error(ErrorCode::UnsupportedLevel, "expected a 2-metric");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParams, "radius must be positive");
  const NMetric one = induce_lower_metric(g, eta2, 0);
  const NMetric zero = induce_lower_metric(g, one, 0);

  LinearizationResult res;
  res.groupoid = g;
  res.eta1 = opt.eta1 ? *opt.eta1 : one.metric;
  res.eta0 = zero.metric;
  res.radius = radius;
  res.geodesic = opt.geodesic;
  res.model = linear_model(g, std::move(s), res.eta0);

  res.injectivity_ratio = probe_ratio(res.normal(), res.eta0, radius, opt);
  if (!(res.injectivity_ratio >= opt.injectivity_floor)) {
    const double est = injectivity_estimate(res.normal(), res.eta0, radius, opt);
    throw Error(ErrorCode::RadiusTooLarge, "radius " + std::to_string(radius) +
                                               " fails the injectivity probe; estimate " +
                                               std::to_string(est));
  }
  if (g.flags.s_proper)
    res.saturated = saturate_neighborhood(g, res.normal().base, radius, 40, opt.seed);
  return res;
}

// ------------------------------------------------------------------ verification

Report verify_linearization(const LinearizationResult& res, std::size_t samples, double tol,
                            std::uint64_t seed, Exec exec) {
  const LieGroupoid& g = res.groupoid;
  const LieGroupoid& gs = res.model.restricted;
  const NormalBundle& nu = res.normal();
  const auto strings = sample_strings(gs, 2, samples, seed);
  const LowDiscrepancy coef_seq(std::max(nu.rank, 1), seed + 7);
  const double scale = nu.rank > 0 ? res.radius / std::sqrt(static_cast<double>(nu.rank)) : 0.0;

  struct Row {
    double diagram = 0.0;
    double morphism = 0.0;
    double unit_inverse = 0.0;
    Vec pre;
    Vec img;
  };
  auto rows = sample_map(
      strings.size(),
      [&](std::size_t i) {
        const Vec& a = strings[i][0];
        const Vec& b = strings[i][1];
        const Vec x = g.s(b);
        const auto u = coef_seq.point(i);
        Vec c(nu.rank);
        for (int k = 0; k < nu.rank; ++k)
          c(k) = (2.0 * u[static_cast<std::size_t>(k)] - 1.0) * scale;
        const Vec w = nu.frame(x) * c;
        const Vec v = normal_rep(g, nu, b, w);

        const Vec eb = res.exp1(b, w);
        const Vec ea = res.exp1(a, v);
        const Vec eab = res.exp1(g.compose(a, b), w);
        const Vec base_x = res.exp0(x, w);
        const Vec base_y = res.exp0(g.t(b), v);

        Row row;
        row.diagram = std::max((g.s(eb) - base_x).norm(), (g.t(eb) - base_y).norm());
        row.morphism = (eab - g.compose_unchecked(ea, eb)).norm();
        row.unit_inverse = std::max((res.exp1(g.u(x), w) - g.u(base_x)).norm(),
                                    (res.exp1(g.inv(b), v) - g.inv(eb)).norm());
        row.pre = pack2(b, w);
        row.img = eb;
        return row;
      },
      exec);

  std::vector<double> defects;
  double diagram = 0.0, morphism = 0.0, unit_inverse = 0.0;
  std::vector<Vec> pre, img;
  for (const Row& r : rows) {
    diagram = std::max(diagram, r.diagram);
    morphism = std::max(morphism, r.morphism);
    unit_inverse = std::max(unit_inverse, r.unit_inverse);
    defects.push_back(std::max({r.diagram, r.morphism, r.unit_inverse}));
    pre.push_back(r.pre);
    img.push_back(r.img);
  }
  const double ratio = separation_ratio(pre, img);
  Report rep = Report::from_defects("verify_linearization", std::move(defects), tol);
  rep.details["diagram"] = diagram;
  rep.details["morphism"] = morphism;
  rep.details["unit_inverse"] = unit_inverse;
  rep.details["injectivity_ratio"] = std::isfinite(ratio) ? ratio : -1.0;
  rep.details["radius"] = res.radius;
  if (std::isfinite(ratio) && ratio < LinearizeOptions{}.injectivity_floor) rep.pass = false;
  return rep;
}

// ------------------------------------------------------------------ fullness

Report fullness_check(const LinearizationResult& res, std::size_t samples, double tol,
                      std::uint64_t seed) {
  const LieGroupoid& g = res.groupoid;
  const LieGroupoid& gs = res.model.restricted;
  const NormalBundle& nu = res.normal();
  const int dg = g.arrows->dim();
  const auto starts = normal_samples(nu, 0.9 * res.radius, samples, seed + 17);
  const LowDiscrepancy fiber_seq(std::max(g.fiber_sample_dim, 1), seed + 19);

  std::vector<double> defects;
  std::size_t found = 0, tested = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    // An arrow of G out of a point of exp0(V) whose target is also in
    // exp0(V): its preimage in G_S x nu must have |v| <= radius.
    const Vec x = res.exp0(starts[i].x, starts[i].v);
    const Vec arrow = g.arrow_with_source(fiber_seq.point(i), x);
    const Vec y = g.t(arrow);
    if (!(nu.base.distance(y) < res.radius)) continue;
    ++tested;

    // Start from the best G_S arrow out of the foot point of x.
    Vec best;
    double best_d = kInf;
    for (int k = 0; k < 64; ++k) {
      const Vec cand = gs.arrow_with_source(fiber_seq.point(1000 + static_cast<std::size_t>(k)),
                                            starts[i].x);
      const double d = (cand - arrow).norm();
      if (d < best_d) best_d = d, best = cand;
      if (gs.fiber_sample_dim == 0) break;
    }
    auto chart = gs.arrows->chart_at(best);
    const int da = chart->dim();
    const Mat frame0 = nu.frame(starts[i].x);
    auto model_point = [&](const Vec& z) {
      const Vec a = chart->point(z.head(da));
      const Mat p = nu.projector(g.s(a));
      return std::pair{a, Vec(p * frame0 * z.tail(nu.rank))};
    };
    auto residual = [&](const Vec& z) {
      const auto [a, v] = model_point(z);
      return Vec(res.exp1(a, v) - arrow);
    };
    Vec z = Vec::Zero(dg);
    z.tail(nu.rank) = frame0.transpose() * nu.eta0.eval(starts[i].x) * starts[i].v;
    double r = residual(z).norm();
    for (int it = 0; it < 8 && r > tol; ++it) {
      Mat j(arrow.size(), dg);
      for (int k = 0; k < dg; ++k) {
        Vec zp = z, zm = z;
        zp(k) += 1e-6;
        zm(k) -= 1e-6;
        j.col(k) = (residual(zp) - residual(zm)) / 2e-6;
      }
      z -= linalg::pinv(j) * residual(z);
      r = residual(z).norm();
    }
    const auto [a, v] = model_point(z);
    const bool inside = r <= tol && nu.eta0.norm(g.s(a), v) <= res.radius * (1.0 + 1e-9);
    if (inside) ++found;
    defects.push_back(inside ? r : kInf);
  }
  Report rep = Report::from_defects("fullness_check", std::move(defects), tol);
  rep.details["tested"] = tested;
  rep.details["found"] = found;
  rep.details["fraction"] = tested ? static_cast<double>(found) / static_cast<double>(tested) : 1.0;
  return rep;
}

Report normal_rep_check(const LieGroupoid& g, const LieGroupoid& restricted,
                        const NormalBundle& nu, std::size_t samples, double tol,
                        std::uint64_t seed, Exec exec) {
  const auto strings = sample_strings(restricted, 2, samples, seed);
  struct Pair {
    double unit;
    double functor;
  };
  const auto res = sample_map(
      strings.size(),
      [&](std::size_t i) {
        const Vec& a = strings[i][0];
        const Vec& b = strings[i][1];
        const Mat tu = normal_rep_matrix(g, nu, g.u(g.s(b)));
        const Mat tab = normal_rep_matrix(g, nu, g.compose(a, b));
        const Mat prod = normal_rep_matrix(g, nu, a) * normal_rep_matrix(g, nu, b);
        const auto op_norm = [](const Mat& m) {
          return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(m).singularValues()(0);
        };
        return Pair{op_norm(tu - Mat::Identity(tu.rows(), tu.cols())), op_norm(tab - prod)};
      },
      exec);
  std::vector<double> defects;
  double unit = 0.0;
  for (const auto& r : res) {
    defects.push_back(r.functor);
    unit = std::max(unit, r.unit);
  }
  auto rep = Report::from_defects("normal_rep", std::move(defects), tol);
  rep.details["unit"] = unit;
  rep.details["functoriality"] = rep.max_defect;
  return rep;
}

}  // namespace lgkit
