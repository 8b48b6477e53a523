#include "lgkit/nmetric.hpp"

#include "lgkit/linalg.hpp"
#include "lgkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgkit {

const char* to_string(MetricProvenance p) {
  switch (p) {
    case MetricProvenance::explicit_formula: return "explicit-formula";
    case MetricProvenance::gauge_trick: return "gauge-trick";
    case MetricProvenance::induced: return "induced";
    case MetricProvenance::user: return "user";
  }
  return "?";
}

nlohmann::json NMetric::describe() const {
  nlohmann::json j;
  j["level"] = level;
  j["provenance"] = to_string(provenance);
  j["name"] = metric.name;
  j["space"] = metric.manifold ? metric.manifold->describe() : "";
  j["evaluation"] = "pointwise";
  j["info"] = info;
  return j;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec> samples_at_level(const LieGroupoid& g, int n, std::size_t count,
                                  std::uint64_t seed) {
  if (n == 0) return sample_points(*g.objects, count, seed);
  return sample_nerve(g, n, count, seed);
}

Mat tangent_restrict(const Mat& ambient, const Mat& basis) {
  return linalg::symmetrize(basis.transpose() * ambient * basis);
}

Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0;
  for (const Mat& b : blocks) rows += b.rows();
  Mat out = Mat::Zero(rows, rows);
  Eigen::Index r = 0;
  for (const Mat& b : blocks) {
    out.block(r, r, b.rows(), b.cols()) = b;
    r += b.rows();
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ explicit metrics

std::vector<Jet> object_jets(const LieGroupoid& g, int n, const Vec& x) {
  if (n == 0) return {jet::input(x, 0, static_cast<int>(x.size()))};
  const int na = g.arrows->ambient_dim();
  std::vector<Jet> a;
  for (int i = 0; i < n; ++i) a.push_back(jet::input(x, i * na, na));
  std::vector<Jet> out{jet::target(g, a.front())};
  for (const Jet& ai : a) out.push_back(jet::source(g, ai));
  return out;
}

SubmersionMetrics submersion_groupoid_metrics(const LieGroupoid& g, const Metric& eta,
                                              const Metric& eta_n, const SmoothMap& pi,
                                              std::size_t samples, double tol) {
  if (g.kind != GroupoidKind::submersion)
    throw Error(ErrorCode::InvalidParams, "expected a submersion groupoid");
  SubmersionMetrics out;
  out.precondition =
      riemannian_submersion_check(pi, eta, eta_n, sample_points(*g.objects, samples, 11), tol);
  if (!out.precondition.pass)
    throw Error(ErrorCode::NotRiemannianSubmersion,
                "projection defect " + std::to_string(out.precondition.max_defect));

  auto level = [&](int n) {
    const LieGroupoid copy = g;
    Metric m{nerve_space(g, n),
             [copy, eta, eta_n, pi, n](const Vec& x) -> Mat {
               const auto p = object_jets(copy, n, x);
               Mat form = Mat::Zero(x.size(), x.size());
               for (const Jet& pj : p) form += pj.jac.transpose() * eta.eval(pj.value) * pj.jac;
               if (n > 0) {
                 const Mat jn = pi.jacobian(p.front().value) * p.front().jac;
                 form -= n * (jn.transpose() * eta_n.eval(pi(p.front().value)) * jn);
               }
               return linalg::symmetrize(form);
             },
             "eta^(" + std::to_string(n) + ")"};
    NMetric nm{n, std::move(m), MetricProvenance::explicit_formula, nlohmann::json::object()};
    nm.info["groupoid"] = g.name;
    return nm;
  };
  out.eta0 = level(0);
  out.eta1 = level(1);
  out.eta2 = level(2);
  return out;
}

// ------------------------------------------------------------------ averaging

Metric average_metric(const Metric& g, const GroupAction& action, const QuadratureRule& quad) {
  quad.validate();
  std::vector<Mat> mats;
  for (const Vec& k : quad.nodes) mats.push_back(action.matrix(k));
  const std::vector<double> w = quad.weights;
  return Metric{g.manifold,
                [g, mats, w](const Vec& x) -> Mat {
                  const auto n = x.size();
                  Mat acc = Mat::Zero(n, n);
                  Mat gk(n, n);
                  Vec y(n);
                  for (std::size_t i = 0; i < mats.size(); ++i) {
                    y.noalias() = mats[i] * x;
                    gk.noalias() = g.eval(y) * mats[i];
                    acc.noalias() += w[i] * (mats[i].transpose() * gk);
                  }
                  return linalg::symmetrize(acc);
                },
                "avg(" + g.name + ")"};
}

double action_invariance_defect(const Metric& g, const GroupAction& action,
                                const std::vector<Vec>& points, const std::vector<Vec>& elements) {
  double worst = 0.0;
  for (const Vec& x : points) {
    const Mat b = g.manifold->tangent_basis(x);
    const Mat base = tangent_restrict(g.eval(x), b);
    for (const Vec& k : elements) {
      const Mat km = action.matrix(k);
      const Mat moved = tangent_restrict(km.transpose() * g.eval(km * x) * km, b);
      worst = std::max(worst, linalg::form_defect(moved, base));
    }
  }
  return worst;
}

// ------------------------------------------------------------------ gauge trick

GaugeTrick gauge_trick(const LieGroupoid& g, const GaugeTrickOptions& opt) {
  if (g.kind != GroupoidKind::action || !g.action)
    throw Error(ErrorCode::NotCompactGroup, "gauge trick needs an action groupoid of a compact group");
  const GroupAction& act = *g.action;
  if (act.haar.size() == 0)
    throw Error(ErrorCode::NotCompactGroup, "group has no quadrature rule");
  act.haar.validate();

  const int n = act.n;
  const int kk = n * n;
  const int na = kk + n;
  const LieGroupoid copy = g;

  GaugeTrick out;
  const Metric eta_m = opt.eta_objects ? *opt.eta_objects : Metric::euclidean(g.objects);
  out.objects_metric = average_metric(eta_m, act, act.haar);

  // Frobenius on K, averaged metric on the base point: invariant under left
  // translation (k', kx)(k, x) = (k'k, x).
  const Metric objects = out.objects_metric;
  out.arrows_metric = Metric{g.arrows,
                             [objects, kk, n](const Vec& a) -> Mat {
                               Mat form = Mat::Zero(kk + n, kk + n);
                               form.topLeftCorner(kk, kk).setIdentity();
                               form.bottomRightCorner(n, n) = objects.eval(a.segment(kk, n));
                               return form;
                             },
                             "eta_G"};

  // Right translation a -> a r_k(s(a)) with r_k(x) = (k, k^{-1} x), averaged
  // over the quadrature nodes. The diagonal action moves every tuple entry by
  // the same arrow, so on tangent vectors of G^[3] its average splits into
  // this per-entry average. For a = (k_a, x), a r_k = (k_a k, k^{-1} x): the
  // K block pulls back by (k k^T) (x) I and the base block by k^{-1}, so the
  // average depends on the source x only.
  std::vector<Mat> node_mats, inv_mats;
  for (const Vec& k : act.haar.nodes) {
    node_mats.push_back(act.matrix(k));
    inv_mats.push_back(node_mats.back().inverse());
  }
  const std::vector<double> weights = act.haar.weights;
  Mat k_block = Mat::Zero(kk, kk);
  for (std::size_t i = 0; i < node_mats.size(); ++i)
    k_block += weights[i] * linalg::kron(node_mats[i] * node_mats[i].transpose(), Mat::Identity(n, n));
  auto right_averaged = [objects, inv_mats, weights, k_block, kk, n, na](const Vec& x) -> Mat {
    Mat acc = Mat::Zero(na, na);
    acc.topLeftCorner(kk, kk) = k_block;
    Mat base = Mat::Zero(n, n);
    Mat gk(n, n);
    Vec y(n);
    for (std::size_t i = 0; i < inv_mats.size(); ++i) {
      const Mat& ki = inv_mats[i];
      y.noalias() = ki * x;
      gk.noalias() = objects.eval(y) * ki;
      base.noalias() += weights[i] * (ki.transpose() * gk);
    }
    acc.bottomRightCorner(n, n) = linalg::symmetrize(base);
    return acc;
  };

  // Product metric (1/3) sum_i p_i^* eta_G on G^[3], symmetrized over S_3
  // by pullback along the tuple permutations.
  const auto perms = permutations(3);
  out.tuple_metric = Metric{
      gauge_space(g, 3),
      [right_averaged, perms, kk, n, na](const Vec& h) -> Mat {
        std::vector<Mat> blocks;
        for (int i = 0; i < 3; ++i) {
          const Vec x = h.segment(i * na + kk, n);
          if (i > 0 && x == h.segment((i - 1) * na + kk, n))
            blocks.push_back(blocks.back());
          else
            blocks.push_back(right_averaged(x) / 3.0);
        }
        Mat acc = Mat::Zero(3 * na, 3 * na);
        for (const Permutation& sigma : perms) {
          // entry i of h sits at sigma(i) in sigma.h
          std::vector<Mat> moved(3);
          Mat p = Mat::Zero(3 * na, 3 * na);
          for (int i = 0; i < 3; ++i) {
            moved[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] =
                blocks[static_cast<std::size_t>(i)];
            p.block(sigma[static_cast<std::size_t>(i)] * na, i * na, na, na).setIdentity();
          }
          acc += p.transpose() * block_diag(moved) * p;
        }
        return linalg::symmetrize(acc / static_cast<double>(perms.size()));
      },
      "eta_G^[3]"};

  const SmoothMap proj = gauge_smooth(g, 2);
  Metric eta2 = pushforward_along(
      proj, out.tuple_metric, nerve_space(g, 2),
      [copy](const Vec& x) { return canonical_lift(copy, 2, x); }, "eta^(2)");

  // The pushforward must not depend on the point of the pi^(2) fiber.
  const auto strings = sample_nerve(g, 2, opt.check_samples, 23);
  std::vector<double> defects;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const Vec h = canonical_lift(g, 2, strings[i]);
    const Vec y = g.s(h.head(na));
    const LowDiscrepancy ld(g.fiber_sample_dim, 29);
    const auto u = ld.point(i);
    const Vec k = g.inv(g.arrow_with_source(u, y));
    const Vec hk = right_translate(g, h, k);
    defects.push_back(std::max(submersion_defect(proj, out.tuple_metric, eta2, h),
                               submersion_defect(proj, out.tuple_metric, eta2, hk)));
  }
  out.pushforward_check =
      Report::from_defects("gauge_pushforward_check", std::move(defects), opt.check_tol);
  if (!out.pushforward_check.pass)
    throw Error(ErrorCode::PushforwardInconsistent,
                "fiber defect " + std::to_string(out.pushforward_check.max_defect));

  out.eta2 = NMetric{2, std::move(eta2), MetricProvenance::gauge_trick, nlohmann::json::object()};
  out.eta2.info["groupoid"] = g.name;
  out.eta2.info["quadrature_nodes"] = act.haar.size();
  out.eta2.info["pushforward_defect"] = out.pushforward_check.max_defect;
  return out;
}

NMetric build_proper_action_2metric(const LieGroupoid& g, const GaugeTrickOptions& opt) {
  return gauge_trick(g, opt).eta2;
}

// ------------------------------------------------------------------ induction

Vec face_preimage(const LieGroupoid& g, int n, int face, const Vec& y) {
  if (n < 1 || face < 0 || face > n) throw Error(ErrorCode::IndexOutOfRange, "face index");
  if (n == 1) return g.u(y);
  if (face == 0) {
    auto parts = split_string(g, y);
    parts.insert(parts.begin(), g.u(g.t(parts.front())));
    return join_string(parts);
  }
  return degeneracy_map(g, n - 1, std::min(face, n - 1), y);
}

namespace {

Metric induced_metric(const LieGroupoid& g, const NMetric& c, int face) {
  const LieGroupoid copy = g;
  const int n = c.level;
  return pushforward_along(
      face_smooth(g, n, face), c.metric, nerve_space(g, n - 1),
      [copy, n, face](const Vec& y) { return face_preimage(copy, n, face, y); },
      "face" + std::to_string(face) + "_*(" + c.metric.name + ")");
}

double face_defect(const LieGroupoid& g, int n, int face, const Metric& total, const Metric& base,
                   const Vec& x) {
  try {
    return submersion_defect(face_smooth(g, n, face), total, base, x);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RankDeficient) return kInf;
    throw;
  }
}

double agreement_defect(const Metric& a, const Metric& b, const Vec& y) {
  const Mat basis = a.manifold->tangent_basis(y);
  if (basis.cols() == 0) return 0.0;
  return linalg::form_defect(tangent_restrict(a.eval(y), basis), tangent_restrict(b.eval(y), basis));
}

}  // namespace

NMetric induce_lower_metric(const LieGroupoid& g, const NMetric& c, int face,
                            std::size_t check_samples, double tol, std::uint64_t seed) {
  const int n = c.level;
  if (n < 1) throw Error(ErrorCode::UnsupportedLevel, "level-0 metrics have no faces");
  if (face < 0 || face > n) throw Error(ErrorCode::IndexOutOfRange, "face index");
  Metric lower = induced_metric(g, c, face);

  double worst = 0.0;
  for (const Vec& x : samples_at_level(g, n, check_samples, seed))
    worst = std::max(worst, face_defect(g, n, face, c.metric, lower, x));
  if (!(worst < tol))
    throw Error(ErrorCode::FaceNotSubmersive,
                "face " + std::to_string(face) + " defect " + std::to_string(worst));

  const Metric other = induced_metric(g, c, face == 0 ? 1 : 0);
  double agreement = 0.0;
  for (const Vec& y : samples_at_level(g, n - 1, check_samples, seed + 1))
    agreement = std::max(agreement, agreement_defect(lower, other, y));

  NMetric out{n - 1, std::move(lower), MetricProvenance::induced, nlohmann::json::object()};
  out.info["from_level"] = n;
  out.info["face"] = face;
  out.info["face_defect"] = worst;
  out.info["cross_face_agreement"] = agreement;
  return out;
}

// ------------------------------------------------------------------ verification

Mat orbit_normal_representation(const LieGroupoid& g, const Metric& eta0, const Vec& a) {
  auto normal_frame = [&](const Vec& x) -> Mat {
    const Vec ux = g.u(x);
    const Mat bg = g.arrows->tangent_basis(ux);
    const Mat ker = linalg::null_space(g.source.jacobian(ux) * bg);
    const Mat bm = g.objects->tangent_basis(x);
    const Mat orbit = bm.transpose() * g.target.jacobian(ux) * bg * ker;
    const Mat form = tangent_restrict(eta0.eval(x), bm);
    const Mat nc = orbit.cols() == 0 ? Mat::Identity(bm.cols(), bm.cols())
                                     : linalg::null_space(orbit.transpose() * form);
    if (nc.cols() == 0) return Mat(bm.rows(), 0);
    return bm * nc * linalg::inv_sqrt_spd(tangent_restrict(form, nc));
  };
  const Vec x = g.s(a), y = g.t(a);
  const Mat fx = normal_frame(x);
  const Mat fy = normal_frame(y);
  const Mat bg = g.arrows->tangent_basis(a);
  const Mat lift = bg * linalg::pinv(g.source.jacobian(a) * bg);
  return fy.transpose() * eta0.eval(y) * g.target.jacobian(a) * lift * fx;
}

Report verify_n_metric(const LieGroupoid& g, const NMetric& c, std::size_t samples, double tol,
                       std::uint64_t seed, Exec exec) {
  const int n = c.level;
  if (n == 0) {
    const auto arrows = sample_arrows(g, samples, seed);
    auto defects = sample_map(
        arrows.size(),
        [&](std::size_t i) {
          return linalg::isometry_defect(orbit_normal_representation(g, c.metric, arrows[i].arrow));
        },
        exec);
    Report r = Report::from_defects("verify_n_metric", std::move(defects), tol);
    r.details["level"] = 0;
    r.details["normal_isometry"] = r.max_defect;
    return r;
  }

  const auto xs = samples_at_level(g, n, samples, seed);
  const auto ys = samples_at_level(g, n - 1, samples, seed + 1);
  const auto perms = permutations(n + 1);
  std::vector<Metric> lower;
  for (int i = 0; i <= n; ++i) lower.push_back(induced_metric(g, c, i));

  struct Row {
    double positivity = 0.0;
    double invariance = 0.0;
    std::vector<double> faces;
    double agreement = 0.0;
  };
  auto rows = sample_map(
      xs.size(),
      [&](std::size_t s) {
        Row row;
        const Vec& x = xs[s];
        const Mat b = c.metric.manifold->tangent_basis(x);
        const Mat form = tangent_restrict(c.metric.eval(x), b);
        if (!(linalg::min_eigenvalue(form) > 0.0)) row.positivity = kInf;
        for (const Permutation& sigma : perms) {
          const Jet j = sym_action_jet(g, sigma, x);
          const Mat d = j.jac * b;
          const Mat pulled = linalg::symmetrize(d.transpose() * c.metric.eval(j.value) * d);
          row.invariance = std::max(row.invariance, linalg::form_defect(pulled, form));
        }
        for (int i = 0; i <= n; ++i)
          row.faces.push_back(face_defect(g, n, i, c.metric, lower[static_cast<std::size_t>(i)], x));
        for (int i = 1; i <= n; ++i)
          row.agreement = std::max(
              row.agreement, agreement_defect(lower[static_cast<std::size_t>(i)], lower[0], ys[s]));
        return row;
      },
      exec);

  std::vector<double> defects;
  double inv = 0.0, agree = 0.0, pos = 0.0;
  std::vector<double> face_max(static_cast<std::size_t>(n) + 1, 0.0);
  for (const Row& row : rows) {
    double d = std::max({row.positivity, row.invariance, row.agreement});
    for (std::size_t i = 0; i < row.faces.size(); ++i) {
      face_max[i] = std::max(face_max[i], row.faces[i]);
      d = std::max(d, row.faces[i]);
    }
    inv = std::max(inv, row.invariance);
    agree = std::max(agree, row.agreement);
    pos = std::max(pos, row.positivity);
    defects.push_back(d);
  }
  Report r = Report::from_defects("verify_n_metric", std::move(defects), tol);
  r.details["level"] = n;
  r.details["invariance"] = inv;
  r.details["faces"] = face_max;
  r.details["agreement"] = agree;
  r.details["positivity"] = pos;
  r.details["provenance"] = to_string(c.provenance);
  return r;
}

}  // namespace lgkit
