#include "lgkit/groupoid.hpp"

#include "lgkit/linalg.hpp"
#include "lgkit/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lgkit {

namespace {

Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

void append_unique(std::vector<Vec>& out, const Vec& v, double tol) {
  for (const Vec& w : out)
    if ((w - v).norm() <= tol) return;
  out.push_back(v);
}

// Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  x.resize(static_cast<std::size_t>(order));
  w.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Mat rot_z(double a) {
  Mat r = Mat::Identity(3, 3);
  r(0, 0) = std::cos(a);
  r(0, 1) = -std::sin(a);
  r(1, 0) = std::sin(a);
  r(1, 1) = std::cos(a);
  return r;
}

Mat rot_y(double b) {
  Mat r = Mat::Identity(3, 3);
  r(0, 0) = std::cos(b);
  r(0, 2) = std::sin(b);
  r(2, 0) = -std::sin(b);
  r(2, 2) = std::cos(b);
  return r;
}

// Structure maps shared by the pair and submersion groupoids: arrow (a, b)
// runs from a to b and (y, z)(x, y) = (x, z).
void install_pair_maps(LieGroupoid& g, int n) {
  const int na = 2 * n;
  g.source = SmoothMap::block(na, 0, n);
  g.target = SmoothMap::block(na, n, n);
  g.unit = SmoothMap(
      n, na, [](const Vec& x) { return concat(x, x); },
      [n, na](const Vec&) -> Mat {
        Mat j(na, n);
        j << Mat::Identity(n, n), Mat::Identity(n, n);
        return j;
      });
  g.inverse = SmoothMap(
      na, na, [n](const Vec& a) { return concat(a.tail(n), a.head(n)); },
      [n, na](const Vec&) -> Mat {
        Mat j = Mat::Zero(na, na);
        j.block(0, n, n, n).setIdentity();
        j.block(n, 0, n, n).setIdentity();
        return j;
      });
  g.multiply = SmoothMap(
      2 * na, na, [n, na](const Vec& gh) { return concat(gh.segment(na, n), gh.segment(n, n)); },
      [n, na](const Vec&) -> Mat {
        Mat j = Mat::Zero(na, 2 * na);
        j.block(0, na, n, n).setIdentity();
        j.block(n, n, n, n).setIdentity();
        return j;
      });
}

}  // namespace

// ------------------------------------------------------------------ quadrature

void QuadratureRule::validate() const {
  if (nodes.empty() || nodes.size() != weights.size())
    throw Error(ErrorCode::QuadratureInvalid, "node and weight counts differ or are zero");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::QuadratureInvalid, "non-positive weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error(ErrorCode::QuadratureInvalid, "weights sum to " + std::to_string(sum));
}

QuadratureRule QuadratureRule::finite(const std::vector<Vec>& elements) {
  QuadratureRule q;
  q.nodes = elements;
  q.weights.assign(elements.size(), 1.0 / static_cast<double>(elements.size()));
  return q;
}

QuadratureRule QuadratureRule::circle(int order) {
  if (order < 1) throw Error(ErrorCode::QuadratureInvalid, "order must be >= 1");
  QuadratureRule q;
  for (int j = 0; j < order; ++j) {
    const double th = 2.0 * std::numbers::pi * j / order;
    Mat r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    q.nodes.push_back(GroupAction::vec(r));
    q.weights.push_back(1.0 / order);
  }
  return q;
}

QuadratureRule QuadratureRule::so3(int order) {
  if (order < 1) throw Error(ErrorCode::QuadratureInvalid, "order must be >= 1");
  std::vector<double> z, wz;
  gauss_legendre(order, z, wz);
  QuadratureRule q;
  const double w_angle = 1.0 / (static_cast<double>(order) * order);
  for (int i = 0; i < order; ++i) {
    const double beta = std::acos(z[static_cast<std::size_t>(i)]);
    for (int a = 0; a < order; ++a)
      for (int c = 0; c < order; ++c) {
        const double alpha = 2.0 * std::numbers::pi * a / order;
        const double gamma = 2.0 * std::numbers::pi * c / order;
        q.nodes.push_back(GroupAction::vec(rot_z(alpha) * rot_y(beta) * rot_z(gamma)));
        q.weights.push_back(0.5 * wz[static_cast<std::size_t>(i)] * w_angle);
      }
  }
  return q;
}

// ------------------------------------------------------------------ actions

double GroupAction::law_defect(const std::vector<Vec>& points, std::uint64_t seed) const {
  const int kd = group->sample_dim();
  LowDiscrepancy seq(std::max(1, 2 * kd), seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto u = seq.point(i);
    const std::span<const double> all(u);
    const Vec a = kd ? group->sample(all.subspan(0, kd)) : identity();
    const Vec b = kd ? group->sample(all.subspan(kd, kd)) : identity();
    const Vec& x = points[i];
    worst = std::max(worst, (act(identity(), x) - x).norm());
    worst = std::max(worst, (act(a, act(b, x)) - act(multiply(a, b), x)).norm());
    worst = std::max(worst, space->residual(act(a, x)));
  }
  return worst;
}

GroupAction GroupAction::finite_group(std::vector<Mat> elements, ManifoldPtr space) {
  if (elements.empty()) throw Error(ErrorCode::InvalidParams, "empty group");
  GroupAction a;
  a.n = static_cast<int>(elements.front().rows());
  if (a.n != space->ambient_dim())
    throw Error(ErrorCode::InvalidParams, "matrix size does not match the space");
  std::vector<Vec> vecs;
  for (const Mat& m : elements) vecs.push_back(vec(m));
  a.group = std::make_shared<FiniteSet>(vecs);
  a.space = std::move(space);
  a.haar = QuadratureRule::finite(vecs);
  a.finite = true;
  return a;
}

GroupAction GroupAction::rotations(int n, ManifoldPtr space, int quadrature_order) {
  if (n != space->ambient_dim())
    throw Error(ErrorCode::InvalidParams, "SO(n) size does not match the space");
  auto so = std::make_shared<SpecialOrthogonal>(n);
  GroupAction a;
  a.n = n;
  a.lie_basis = so->lie_basis();
  a.group = so;
  a.space = std::move(space);
  if (n == 2)
    a.haar = QuadratureRule::circle(quadrature_order);
  else if (n == 3)
    a.haar = QuadratureRule::so3(quadrature_order);
  else
    throw Error(ErrorCode::NotCompactGroup, "no quadrature rule for SO(n), n > 3");
  return a;
}

// ------------------------------------------------------------------ groupoid

const char* to_string(GroupoidKind kind) {
  switch (kind) {
    case GroupoidKind::unit: return "unit";
    case GroupoidKind::pair: return "pair";
    case GroupoidKind::submersion: return "submersion";
    case GroupoidKind::action: return "action";
    case GroupoidKind::restricted: return "restricted";
    case GroupoidKind::linear_model: return "linear_model";
  }
  return "?";
}

Vec LieGroupoid::compose_unchecked(const Vec& g, const Vec& h) const {
  const Vec raw = multiply(concat(g, h));
  if (arrows->residual(raw) <= 1e-14) return raw;
  return arrows->project(raw, kDefaultCaptureRadius);
}

Vec LieGroupoid::compose(const Vec& g, const Vec& h) const {
  const double gap = (s(g) - t(h)).norm();
  if (gap > kComposeTol)
    throw Error(ErrorCode::NotComposable, "|s(g) - t(h)| = " + std::to_string(gap));
  return compose_unchecked(g, h);
}

Vec LieGroupoid::sample_arrow(std::span<const double> u) const {
  const int od = objects->sample_dim();
  return arrow_with_source(u.subspan(static_cast<std::size_t>(od)), objects->sample(u.subspan(0, od)));
}

LieGroupoid LieGroupoid::with_multiply(SmoothMap m) const {
  LieGroupoid out = *this;
  out.multiply = std::move(m);
  return out;
}

int string_sample_dim(const LieGroupoid& g, int n) {
  return g.arrow_sample_dim() + (n - 1) * g.fiber_sample_dim;
}

std::vector<Vec> string_from_uniforms(const LieGroupoid& g, int n, std::span<const double> u) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "string length must be >= 1");
  const auto ad = static_cast<std::size_t>(g.arrow_sample_dim());
  const auto fd = static_cast<std::size_t>(g.fiber_sample_dim);
  std::vector<Vec> str(static_cast<std::size_t>(n));
  str.back() = g.sample_arrow(u.subspan(0, ad));
  std::size_t off = ad;
  for (int j = n - 2; j >= 0; --j) {
    const auto k = static_cast<std::size_t>(j);
    str[k] = g.arrow_with_source(u.subspan(off, fd), g.t(str[k + 1]));
    off += fd;
  }
  for (std::size_t j = 0; j + 1 < str.size(); ++j)
    if ((g.s(str[j]) - g.t(str[j + 1])).norm() > kComposeTol)
      throw Error(ErrorCode::SamplingFailure, g.name + ": sampler produced a non-composable string");
  return str;
}

std::vector<std::vector<Vec>> sample_strings(const LieGroupoid& g, int n, std::size_t count,
                                             std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "string length must be >= 1");
  const LowDiscrepancy seq(std::max(1, string_sample_dim(g, n)), seed);
  std::vector<std::vector<Vec>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = seq.point(i);
    out[i] = string_from_uniforms(g, n, u);
  }
  return out;
}

std::vector<ArrowSample> sample_arrows(const LieGroupoid& g, std::size_t count,
                                       std::uint64_t seed) {
  std::vector<ArrowSample> out;
  out.reserve(count);
  for (auto& str : sample_strings(g, 1, count, seed)) {
    const Vec& a = str.front();
    out.push_back({a, g.s(a), g.t(a)});
  }
  return out;
}

// ------------------------------------------------------------------ builders

LieGroupoid build_unit_groupoid(ManifoldPtr m) {
  const int n = m->ambient_dim();
  LieGroupoid g;
  g.name = "unit(" + m->describe() + ")";
  g.kind = GroupoidKind::unit;
  g.objects = m;
  g.arrows = m;
  g.source = SmoothMap::identity(n);
  g.target = SmoothMap::identity(n);
  g.unit = SmoothMap::identity(n);
  g.inverse = SmoothMap::identity(n);
  g.multiply = SmoothMap::block(2 * n, 0, n);
  g.flags = {true, true};
  g.arrow_with_source = [](std::span<const double>, const Vec& x) { return x; };
  g.fiber_sample_dim = 0;
  return g;
}

LieGroupoid build_pair_groupoid(const PairParams& params) {
  if (!params.space) throw Error(ErrorCode::InvalidParams, "pair groupoid needs a space");
  const ManifoldPtr m = params.space;
  LieGroupoid g;
  g.name = "pair(" + m->describe() + ")";
  g.kind = GroupoidKind::pair;
  g.objects = m;
  g.arrows = std::make_shared<ProductManifold>(std::vector<ManifoldPtr>{m, m});
  install_pair_maps(g, m->ambient_dim());
  g.flags = {params.compact, params.compact};
  g.arrow_with_source = [m](std::span<const double> u, const Vec& x) {
    return concat(x, m->sample(u));
  };
  g.fiber_sample_dim = m->sample_dim();
  return g;
}

LieGroupoid build_submersion_groupoid(const SubmersionParams& params) {
  if (!params.total || !params.base || !params.pi || !params.fiber_sampler)
    throw Error(ErrorCode::InvalidParams, "submersion groupoid needs M, N, pi and a fiber sampler");
  const ManifoldPtr m = params.total;
  const SmoothMap pi = params.pi;
  const int n = m->ambient_dim();
  const int dn = params.base->dim();

  for (const Vec& x : sample_points(*m, 16, 3)) {
    if (linalg::numerical_rank(pi.differential(*m, x)) < dn)
      throw Error(ErrorCode::RankDeficientSubmersion, "d pi is not onto the base");
  }

  const SmoothMap constraint(
      2 * n, pi.out_dim(),
      [pi, n](const Vec& ab) -> Vec { return pi(ab.head(n)) - pi(ab.tail(n)); },
      [pi, n](const Vec& ab) -> Mat {
        Mat j(pi.out_dim(), 2 * n);
        j << pi.jacobian(ab.head(n)), -pi.jacobian(ab.tail(n));
        return j;
      });
  auto fiber = params.fiber_sampler;
  const int md = m->sample_dim();
  const int fd = params.fiber_sample_dim;
  auto sampler = [m, fiber, md, fd](std::span<const double> u) -> Vec {
    const Vec x = m->sample(u.subspan(0, md));
    return concat(x, fiber(u.subspan(md, fd), x));
  };
  auto product = std::make_shared<ProductManifold>(std::vector<ManifoldPtr>{m, m});

  LieGroupoid g;
  g.name = "submersion(" + m->describe() + " -> " + params.base->describe() + ")";
  g.kind = GroupoidKind::submersion;
  g.objects = m;
  g.arrows = std::make_shared<ConstrainedManifold>(product, constraint, 2 * m->dim() - dn,
                                                   "M x_N M", ManifoldKind::fiber_product,
                                                   sampler, md + fd);
  install_pair_maps(g, n);
  g.flags = {true, params.pi_proper};
  g.arrow_with_source = [fiber](std::span<const double> u, const Vec& x) {
    return concat(x, fiber(u, x));
  };
  g.fiber_sample_dim = fd;
  return g;
}

LieGroupoid build_action_groupoid(std::shared_ptr<const GroupAction> action) {
  if (!action || !action->group || !action->space)
    throw Error(ErrorCode::InvalidParams, "action groupoid needs a group action");
  action->haar.validate();
  const int n = action->n;
  const int kk = n * n;
  const int na = kk + n;
  const ManifoldPtr k_group = action->group;
  const ManifoldPtr m = action->space;
  if (action->law_defect(sample_points(*m, 16, 5), 5) > 1e-9)
    throw Error(ErrorCode::InvalidParams, "action laws fail on samples");

  auto mat = [n](const Vec& v) -> Mat { return Eigen::Map<const Mat>(v.data(), n, n); };
  const Mat id = Mat::Identity(n, n);

  LieGroupoid g;
  g.name = "action(" + k_group->describe() + " on " + m->describe() + ")";
  g.kind = GroupoidKind::action;
  g.objects = m;
  g.arrows = std::make_shared<ProductManifold>(std::vector<ManifoldPtr>{k_group, m});
  g.source = SmoothMap::block(na, kk, n);
  g.target = SmoothMap(
      na, n, [mat, kk, n](const Vec& a) -> Vec { return mat(a.head(kk)) * a.segment(kk, n); },
      [mat, kk, n, id](const Vec& a) -> Mat {
        Mat j(n, kk + n);
        j << linalg::kron(a.segment(kk, n).transpose(), id), mat(a.head(kk));
        return j;
      });
  g.unit = SmoothMap(
      n, na, [id](const Vec& x) { return concat(GroupAction::vec(id), x); },
      [kk, n, na](const Vec&) -> Mat {
        Mat j = Mat::Zero(na, n);
        j.block(kk, 0, n, n).setIdentity();
        return j;
      });
  g.inverse = SmoothMap(
      na, na,
      [mat, kk, n](const Vec& a) -> Vec {
        const Mat k = mat(a.head(kk));
        return concat(GroupAction::vec(k.inverse()), k * a.segment(kk, n));
      },
      [mat, kk, n, na, id](const Vec& a) -> Mat {
        const Mat k = mat(a.head(kk));
        const Mat ki = k.inverse();
        Mat j = Mat::Zero(na, na);
        j.block(0, 0, kk, kk) = -linalg::kron(ki.transpose(), ki);
        j.block(kk, 0, n, kk) = linalg::kron(a.segment(kk, n).transpose(), id);
        j.block(kk, kk, n, n) = k;
        return j;
      });
  g.multiply = SmoothMap(
      2 * na, na,
      [mat, kk, n, na](const Vec& gh) -> Vec {
        return concat(GroupAction::vec(mat(gh.head(kk)) * mat(gh.segment(na, kk))),
                      gh.segment(na + kk, n));
      },
      [mat, kk, n, na, id](const Vec& gh) -> Mat {
        const Mat k1 = mat(gh.head(kk));
        const Mat k2 = mat(gh.segment(na, kk));
        Mat j = Mat::Zero(na, 2 * na);
        j.block(0, 0, kk, kk) = linalg::kron(k2.transpose(), id);
        j.block(0, na, kk, kk) = linalg::kron(id, k1);
        j.block(kk, na + kk, n, n).setIdentity();
        return j;
      });
  g.flags = {true, true};
  g.arrow_with_source = [k_group](std::span<const double> u, const Vec& x) {
    return concat(k_group->sample(u), x);
  };
  g.fiber_sample_dim = k_group->sample_dim();
  g.action = std::move(action);
  return g;
}

// ------------------------------------------------------------------ checks

Report check_axioms(const LieGroupoid& g, std::size_t n_samples, double tol, std::uint64_t seed,
                    Exec exec) {
  const auto triples = sample_strings(g, 3, n_samples, seed);
  const int dm = g.objects->dim();
  struct Row {
    double assoc = 0, unit = 0, inverse = 0, rank = 0;
  };
  auto rows = sample_map(
      triples.size(),
      [&](std::size_t i) {
        const Vec& a = triples[i][0];
        const Vec& b = triples[i][1];
        const Vec& c = triples[i][2];
        const Vec x = g.s(a);
        const Vec y = g.t(a);
        Row r;
        r.assoc = (g.compose_unchecked(g.compose_unchecked(a, b), c) -
                   g.compose_unchecked(a, g.compose_unchecked(b, c)))
                      .norm();
        const Vec ux = g.u(x);
        const Vec uy = g.u(y);
        r.unit = std::max({(g.s(ux) - x).norm(), (g.t(ux) - x).norm(),
                           (g.compose_unchecked(uy, a) - a).norm(),
                           (g.compose_unchecked(a, ux) - a).norm()});
        const Vec ai = g.inv(a);
        r.inverse = std::max((g.compose_unchecked(a, ai) - uy).norm(),
                             (g.compose_unchecked(ai, a) - ux).norm());
        const bool full = linalg::numerical_rank(g.source.differential(*g.arrows, a)) == dm &&
                          linalg::numerical_rank(g.target.differential(*g.arrows, a)) == dm;
        r.rank = full ? 0.0 : std::numeric_limits<double>::infinity();
        return r;
      },
      exec);

  std::vector<double> defects;
  Row worst;
  for (const Row& r : rows) {
    defects.push_back(std::max({r.assoc, r.unit, r.inverse, r.rank}));
    worst.assoc = std::max(worst.assoc, r.assoc);
    worst.unit = std::max(worst.unit, r.unit);
    worst.inverse = std::max(worst.inverse, r.inverse);
    worst.rank = std::max(worst.rank, r.rank);
  }
  Report rep = Report::from_defects("check_axioms", std::move(defects), tol);
  rep.details["groupoid"] = g.name;
  rep.details["associativity"] = worst.assoc;
  rep.details["unit"] = worst.unit;
  rep.details["inverse"] = worst.inverse;
  rep.details["rank_ok"] = worst.rank == 0.0;
  return rep;
}

std::vector<Vec> orbit_sample(const LieGroupoid& g, const Vec& x, int budget, std::uint64_t seed) {
  std::vector<Vec> out;
  const bool discrete = g.arrows->dim() == g.objects->dim();
  const double dedupe = discrete ? 1e-12 : -1.0;
  auto push = [&](const Vec& y) {
    if (dedupe > 0)
      append_unique(out, y, dedupe);
    else
      out.push_back(y);
  };
  push(x);
  if (g.action && static_cast<int>(g.action->haar.size()) <= budget) {
    for (const Vec& k : g.action->haar.nodes) push(g.action->act(k, x));
    return out;
  }
  if (g.fiber_sample_dim == 0) return out;
  const LowDiscrepancy seq(g.fiber_sample_dim, seed);
  for (int i = 1; i < budget; ++i) {
    const auto u = seq.point(static_cast<std::size_t>(i));
    push(g.t(g.arrow_with_source(u, x)));
  }
  return out;
}

std::vector<Vec> isotropy_sample(const LieGroupoid& g, const Vec& x, int budget,
                                 std::uint64_t seed) {
  std::vector<Vec> candidates;
  if (g.action && static_cast<int>(g.action->haar.size()) <= budget) {
    for (const Vec& k : g.action->haar.nodes) candidates.push_back(concat(k, x));
  } else if (g.fiber_sample_dim == 0) {
    candidates.push_back(g.arrow_with_source({}, x));
  } else {
    const LowDiscrepancy seq(g.fiber_sample_dim, seed);
    for (int i = 0; i < budget; ++i)
      candidates.push_back(g.arrow_with_source(seq.point(static_cast<std::size_t>(i)), x));
  }

  auto residual = [&](const Vec& a) { return concat(g.s(a) - x, g.t(a) - x); };
  std::vector<Vec> out;
  for (Vec a : candidates) {
    Vec r = residual(a);
    for (int it = 0; it < 40 && r.norm() > 1e-14 && g.arrows->dim() > 0; ++it) {
      auto chart = g.arrows->chart_at(a);
      Mat jr(r.size(), chart->dim());
      const Mat jc = chart->jacobian(Vec::Zero(chart->dim()));
      jr << g.source.jacobian(a) * jc, g.target.jacobian(a) * jc;
      const Vec step = -linalg::pinv(jr) * r;
      a = chart->point(step);
      r = residual(a);
      if (step.norm() < 1e-15) break;
    }
    if (r.norm() <= kGeometryTol) append_unique(out, a, 1e-7);
  }
  return out;
}

// ------------------------------------------------------------------ saturated

double SaturatedSubmanifold::distance(const Vec& x) const {
  try {
    return (manifold->project(x, std::numeric_limits<double>::infinity()) - x).norm();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

SaturatedSubmanifold make_submanifold(ManifoldPtr parent, SmoothMap defining, int dim,
                                      std::string name, ConstrainedManifold::Sampler sampler,
                                      int sample_dim) {
  SaturatedSubmanifold s;
  s.parent = parent;
  s.defining = defining;
  s.manifold = std::make_shared<ConstrainedManifold>(parent, defining, dim, std::move(name),
                                                     ManifoldKind::fiber_product,
                                                     std::move(sampler), sample_dim);
  return s;
}

Report saturation_check(const LieGroupoid& g, const SaturatedSubmanifold& s, int points,
                        int budget, double tol, std::uint64_t seed) {
  const auto xs = sample_points(*s.manifold, static_cast<std::size_t>(points), seed);
  std::vector<double> defects;
  for (const Vec& x : xs) {
    double worst = 0.0;
    for (const Vec& y : orbit_sample(g, x, budget, seed)) worst = std::max(worst, s.distance(y));
    defects.push_back(worst);
  }
  Report rep = Report::from_defects("saturation_check", std::move(defects), tol);
  rep.details["submanifold"] = s.manifold->describe();
  return rep;
}

LieGroupoid restrict_to_saturated(const LieGroupoid& g, SaturatedSubmanifold& s) {
  s.certificate = saturation_check(g, s);
  if (!s.certificate.pass)
    throw Error(ErrorCode::NotSaturated, s.manifold->describe() + ": orbit escapes by " +
                                             std::to_string(s.certificate.max_defect));
  const SmoothMap phi = s.defining;
  const SmoothMap src = g.source;
  const SmoothMap c(
      g.arrows->ambient_dim(), phi.out_dim(), [phi, src](const Vec& a) { return phi(src(a)); },
      [phi, src](const Vec& a) -> Mat { return phi.jacobian(src(a)) * src.jacobian(a); });
  const int codim = g.objects->dim() - s.manifold->dim();
  auto sub = s.manifold;
  auto fiber = g.arrow_with_source;
  const int sd = sub->sample_dim();
  const int fd = g.fiber_sample_dim;
  auto sampler = [sub, fiber, sd, fd](std::span<const double> u) -> Vec {
    const Vec x = sub->sample(u.subspan(0, sd));
    return fiber(u.subspan(sd, fd), x);
  };

  LieGroupoid r = g;
  r.name = g.name + "|" + s.manifold->describe();
  r.kind = GroupoidKind::restricted;
  r.objects = s.manifold;
  r.arrows = std::make_shared<ConstrainedManifold>(g.arrows, c, g.arrows->dim() - codim,
                                                   "s^-1(" + s.manifold->describe() + ")",
                                                   ManifoldKind::fiber_product, sampler, sd + fd);
  return r;
}

nlohmann::json describe(const LieGroupoid& g) {
  return {{"name", g.name},
          {"kind", to_string(g.kind)},
          {"objects", g.objects->describe()},
          {"arrows", g.arrows->describe()},
          {"dim_objects", g.objects->dim()},
          {"dim_arrows", g.arrows->dim()},
          {"proper", g.flags.proper},
          {"s_proper", g.flags.s_proper}};
}

}  // namespace lgkit
