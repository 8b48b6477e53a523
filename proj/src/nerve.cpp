#include "lgkit/nerve.hpp"

#include "lgkit/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace lgkit {

// ------------------------------------------------------------------ jets

namespace jet {

Jet input(const Vec& x, int offset, int size) {
  Jet j{x.segment(offset, size), Mat::Zero(size, x.size())};
  j.jac.block(0, offset, size, size).setIdentity();
  return j;
}

Jet source(const LieGroupoid& g, const Jet& a) {
  return {g.s(a.value), g.source.jacobian(a.value) * a.jac};
}

Jet target(const LieGroupoid& g, const Jet& a) {
  return {g.t(a.value), g.target.jacobian(a.value) * a.jac};
}

Jet unit(const LieGroupoid& g, const Jet& x) {
  return {g.u(x.value), g.unit.jacobian(x.value) * x.jac};
}

Jet inverse(const LieGroupoid& g, const Jet& a) {
  return {g.inv(a.value), g.inverse.jacobian(a.value) * a.jac};
}

Jet multiply(const LieGroupoid& g, const Jet& a, const Jet& b) {
  Vec ab(a.value.size() + b.value.size());
  ab << a.value, b.value;
  Mat dab(ab.size(), a.jac.cols());
  dab << a.jac, b.jac;
  return {g.compose_unchecked(a.value, b.value), g.multiply.jacobian(ab) * dab};
}

Jet concat(const std::vector<Jet>& parts) {
  Eigen::Index rows = 0;
  for (const Jet& p : parts) rows += p.value.size();
  const Eigen::Index cols = parts.empty() ? 0 : parts.front().jac.cols();
  Jet out{Vec(rows), Mat(rows, cols)};
  Eigen::Index r = 0;
  for (const Jet& p : parts) {
    out.value.segment(r, p.value.size()) = p.value;
    out.jac.middleRows(r, p.value.size()) = p.jac;
    r += p.value.size();
  }
  return out;
}

}  // namespace jet

// ------------------------------------------------------------------ permutations

std::vector<Permutation> permutations(int m) {
  Permutation p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[static_cast<std::size_t>(b[i])];
  return out;
}

Permutation inverse(const Permutation& p) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return out;
}

// ------------------------------------------------------------------ spaces

namespace {

int arrow_dim(const LieGroupoid& g) { return g.arrows->ambient_dim(); }

std::vector<Jet> input_arrows(const LieGroupoid& g, const Vec& x, int count) {
  const int na = arrow_dim(g);
  if (x.size() != static_cast<Eigen::Index>(count) * na)
    throw Error(ErrorCode::IndexOutOfRange, "string length does not match its level");
  std::vector<Jet> a;
  for (int k = 0; k < count; ++k) a.push_back(jet::input(x, k * na, na));
  return a;
}

void check_level(int n, int lo, int i, int hi) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "level must be >= 1");
  if (i < lo || i > hi)
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(i) + " outside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
}

void check_permutation(const Permutation& sigma, int n) {
  if (static_cast<int>(sigma.size()) != n + 1)
    throw Error(ErrorCode::IndexOutOfRange, "permutation size must be n + 1");
  Permutation sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) throw Error(ErrorCode::IndexOutOfRange, "not a permutation");
}

SmoothMap smooth_from_jet(int in, int out, std::function<Jet(const Vec&)> f) {
  return SmoothMap(
      in, out, [f](const Vec& x) { return f(x).value; }, [f](const Vec& x) { return f(x).jac; });
}

}  // namespace

std::vector<Vec> split_string(const LieGroupoid& g, const Vec& x) {
  const int na = arrow_dim(g);
  std::vector<Vec> out;
  for (Eigen::Index k = 0; k + na <= x.size(); k += na) out.push_back(x.segment(k, na));
  return out;
}

Vec join_string(const std::vector<Vec>& arrows) {
  Eigen::Index rows = 0;
  for (const Vec& a : arrows) rows += a.size();
  Vec x(rows);
  Eigen::Index r = 0;
  for (const Vec& a : arrows) {
    x.segment(r, a.size()) = a;
    r += a.size();
  }
  return x;
}

ManifoldPtr nerve_space(const LieGroupoid& g, int n) {
  if (n < 0) throw Error(ErrorCode::IndexOutOfRange, "negative level");
  if (n == 0) return g.objects;
  if (n == 1) return g.arrows;
  const int na = arrow_dim(g);
  const int nm = g.objects->ambient_dim();
  const SmoothMap s = g.source, t = g.target;
  const SmoothMap c(
      n * na, (n - 1) * nm,
      [s, t, n, na, nm](const Vec& x) -> Vec {
        Vec r((n - 1) * nm);
        for (int i = 0; i + 1 < n; ++i)
          r.segment(i * nm, nm) = s(x.segment(i * na, na)) - t(x.segment((i + 1) * na, na));
        return r;
      },
      [s, t, n, na, nm](const Vec& x) -> Mat {
        Mat j = Mat::Zero((n - 1) * nm, n * na);
        for (int i = 0; i + 1 < n; ++i) {
          j.block(i * nm, i * na, nm, na) = s.jacobian(x.segment(i * na, na));
          j.block(i * nm, (i + 1) * na, nm, na) = -t.jacobian(x.segment((i + 1) * na, na));
        }
        return j;
      });
  std::vector<ManifoldPtr> factors(static_cast<std::size_t>(n), g.arrows);
  auto product = std::make_shared<ProductManifold>(factors);
  const LieGroupoid copy = g;
  return std::make_shared<ConstrainedManifold>(
      product, c, n * g.arrows->dim() - (n - 1) * g.objects->dim(),
      "G^(" + std::to_string(n) + ")", ManifoldKind::fiber_product,
      [copy, n](std::span<const double> u) { return join_string(string_from_uniforms(copy, n, u)); },
      string_sample_dim(g, n));
}

ManifoldPtr gauge_space(const LieGroupoid& g, int m) {
  if (m < 1) throw Error(ErrorCode::IndexOutOfRange, "tuple size must be >= 1");
  if (m == 1) return g.arrows;
  const int na = arrow_dim(g);
  const int nm = g.objects->ambient_dim();
  const SmoothMap s = g.source;
  const SmoothMap c(
      m * na, (m - 1) * nm,
      [s, m, na, nm](const Vec& h) -> Vec {
        Vec r((m - 1) * nm);
        const Vec s0 = s(h.head(na));
        for (int i = 1; i < m; ++i) r.segment((i - 1) * nm, nm) = s(h.segment(i * na, na)) - s0;
        return r;
      },
      [s, m, na, nm](const Vec& h) -> Mat {
        Mat j = Mat::Zero((m - 1) * nm, m * na);
        const Mat ds0 = s.jacobian(h.head(na));
        for (int i = 1; i < m; ++i) {
          j.block((i - 1) * nm, 0, nm, na) = -ds0;
          j.block((i - 1) * nm, i * na, nm, na) = s.jacobian(h.segment(i * na, na));
        }
        return j;
      });
  std::vector<ManifoldPtr> factors(static_cast<std::size_t>(m), g.arrows);
  auto product = std::make_shared<ProductManifold>(factors);
  const LieGroupoid copy = g;
  const auto od = static_cast<std::size_t>(g.objects->sample_dim());
  const auto fd = static_cast<std::size_t>(g.fiber_sample_dim);
  return std::make_shared<ConstrainedManifold>(
      product, c, m * g.arrows->dim() - (m - 1) * g.objects->dim(),
      "G^[" + std::to_string(m) + "]", ManifoldKind::fiber_product,
      [copy, m, od, fd](std::span<const double> u) {
        const Vec x = copy.objects->sample(u.subspan(0, od));
        std::vector<Vec> h;
        for (int i = 0; i < m; ++i)
          h.push_back(copy.arrow_with_source(u.subspan(od + static_cast<std::size_t>(i) * fd, fd), x));
        return join_string(h);
      },
      static_cast<int>(od + static_cast<std::size_t>(m) * fd));
}

// ------------------------------------------------------------------ faces

Jet face_jet(const LieGroupoid& g, int n, int i, const Vec& x) {
  check_level(n, 0, i, n);
  const auto a = input_arrows(g, x, n);
  if (n == 1) return i == 0 ? jet::source(g, a[0]) : jet::target(g, a[0]);
  std::vector<Jet> parts;
  for (int k = 0; k < n; ++k) {
    if (i == 0 && k == 0) continue;
    if (i == n && k == n - 1) continue;
    if (i > 0 && i < n && k == i - 1) {
      parts.push_back(jet::multiply(g, a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(k) + 1]));
      ++k;
      continue;
    }
    parts.push_back(a[static_cast<std::size_t>(k)]);
  }
  return jet::concat(parts);
}

Vec face_map(const LieGroupoid& g, int n, int i, const Vec& x) { return face_jet(g, n, i, x).value; }

SmoothMap face_smooth(const LieGroupoid& g, int n, int i) {
  check_level(n, 0, i, n);
  const int na = arrow_dim(g);
  const int out = n == 1 ? g.objects->ambient_dim() : (n - 1) * na;
  const LieGroupoid copy = g;
  return smooth_from_jet(n * na, out, [copy, n, i](const Vec& x) { return face_jet(copy, n, i, x); });
}

Jet degeneracy_jet(const LieGroupoid& g, int n, int i, const Vec& x) {
  check_level(n, 1, i, n);
  const auto a = input_arrows(g, x, n);
  std::vector<Jet> parts;
  for (int k = 0; k < n; ++k) {
    parts.push_back(a[static_cast<std::size_t>(k)]);
    if (k == i - 1) parts.push_back(jet::unit(g, jet::source(g, a[static_cast<std::size_t>(k)])));
  }
  return jet::concat(parts);
}

Vec degeneracy_map(const LieGroupoid& g, int n, int i, const Vec& x) {
  return degeneracy_jet(g, n, i, x).value;
}

// ------------------------------------------------------------------ gauge

Jet canonical_lift_jet(const LieGroupoid& g, int n, const Vec& x) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "level must be >= 1");
  const auto a = input_arrows(g, x, n);
  std::vector<Jet> h(static_cast<std::size_t>(n) + 1);
  h[static_cast<std::size_t>(n)] = jet::unit(g, jet::source(g, a.back()));
  h[static_cast<std::size_t>(n) - 1] = a.back();
  for (int i = n - 2; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    h[k] = jet::multiply(g, a[k], h[k + 1]);
  }
  return jet::concat(h);
}

Vec canonical_lift(const LieGroupoid& g, int n, const Vec& x) {
  return canonical_lift_jet(g, n, x).value;
}

namespace {

Jet project_tuple(const LieGroupoid& g, const std::vector<Jet>& h) {
  const Vec s0 = g.s(h.front().value);
  for (const Jet& hi : h)
    if ((g.s(hi.value) - s0).norm() > kComposeTol)
      throw Error(ErrorCode::NotCommonSource, "tuple entries have different sources");
  std::vector<Jet> parts;
  for (std::size_t i = 1; i < h.size(); ++i)
    parts.push_back(jet::multiply(g, h[i - 1], jet::inverse(g, h[i])));
  return jet::concat(parts);
}

}  // namespace

Jet gauge_projection_jet(const LieGroupoid& g, int n, const Vec& h) {
  if (n < 1) throw Error(ErrorCode::IndexOutOfRange, "level must be >= 1");
  return project_tuple(g, input_arrows(g, h, n + 1));
}

Vec gauge_projection(const LieGroupoid& g, int n, const Vec& h) {
  return gauge_projection_jet(g, n, h).value;
}

SmoothMap gauge_smooth(const LieGroupoid& g, int n) {
  const int na = arrow_dim(g);
  const LieGroupoid copy = g;
  return smooth_from_jet((n + 1) * na, n * na,
                         [copy, n](const Vec& h) { return gauge_projection_jet(copy, n, h); });
}

Vec permute_tuple(const LieGroupoid& g, const Permutation& sigma, const Vec& h) {
  const auto parts = split_string(g, h);
  std::vector<Vec> out(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) out[static_cast<std::size_t>(sigma[i])] = parts[i];
  return join_string(out);
}

Vec right_translate(const LieGroupoid& g, const Vec& h, const Vec& k) {
  auto parts = split_string(g, h);
  for (Vec& p : parts) p = g.compose(p, k);
  return join_string(parts);
}

// ------------------------------------------------------------------ symmetric action

Jet sym_action_jet(const LieGroupoid& g, const Permutation& sigma, const Vec& x) {
  const int n = static_cast<int>(sigma.size()) - 1;
  check_permutation(sigma, n);
  const auto a = input_arrows(g, x, n);
  const Permutation id = permutations(n + 1).front();
  if (sigma == id) return jet::concat(a);
  if (n == 1) return jet::inverse(g, a[0]);
  if (n == 2) {
    const Jet& g1 = a[0];
    const Jet& g2 = a[1];
    const Jet g12 = jet::multiply(g, g1, g2);
    if (sigma == Permutation{1, 0, 2}) return jet::concat({jet::inverse(g, g1), g12});
    if (sigma == Permutation{0, 2, 1}) return jet::concat({g12, jet::inverse(g, g2)});
    if (sigma == Permutation{2, 1, 0})
      return jet::concat({jet::inverse(g, g2), jet::inverse(g, g1)});
    if (sigma == Permutation{2, 0, 1}) return jet::concat({g2, jet::inverse(g, g12)});
    if (sigma == Permutation{1, 2, 0}) return jet::concat({jet::inverse(g, g12), g1});
  }
  const Jet lift = canonical_lift_jet(g, n, x);
  const int na = arrow_dim(g);
  std::vector<Jet> h(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i)
    h[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] =
        Jet{lift.value.segment(i * na, na), lift.jac.middleRows(i * na, na)};
  return project_tuple(g, h);
}

Vec sym_action(const LieGroupoid& g, const Permutation& sigma, const Vec& x) {
  return sym_action_jet(g, sigma, x).value;
}

SmoothMap sym_smooth(const LieGroupoid& g, const Permutation& sigma) {
  const int n = static_cast<int>(sigma.size()) - 1;
  const int na = arrow_dim(g);
  const LieGroupoid copy = g;
  return smooth_from_jet(n * na, n * na,
                         [copy, sigma](const Vec& x) { return sym_action_jet(copy, sigma, x); });
}

Vec sym_action_lifted(const LieGroupoid& g, const Permutation& sigma, const Vec& x) {
  const int n = static_cast<int>(sigma.size()) - 1;
  check_permutation(sigma, n);
  return gauge_projection(g, n, permute_tuple(g, sigma, canonical_lift(g, n, x)));
}

std::vector<Vec> sample_nerve(const LieGroupoid& g, int n, std::size_t count, std::uint64_t seed) {
  std::vector<Vec> out;
  out.reserve(count);
  for (auto& str : sample_strings(g, n, count, seed)) out.push_back(join_string(str));
  return out;
}

// ------------------------------------------------------------------ checks

Report check_simplicial(const LieGroupoid& g, int max_level, std::size_t n_samples, double tol,
                        std::uint64_t seed, Exec exec) {
  struct Row {
    double faces = 0, degeneracies = 0, action = 0, gauge = 0;
  };
  auto dist = [](const Vec& a, const Vec& b) { return (a - b).norm(); };
  std::vector<Report> parts;
  Row worst;
  for (int n = 1; n <= max_level; ++n) {
    const auto strings = sample_nerve(g, n, n_samples, seed + static_cast<std::uint64_t>(n));
    const auto next = nerve_space(g, n + 1);
    const LowDiscrepancy kseq(std::max(1, g.fiber_sample_dim), seed + 101);
    const auto perms = permutations(n + 1);
    auto rows = sample_map(
        strings.size(),
        [&](std::size_t idx) {
          const Vec& x = strings[idx];
          Row r;
          if (n >= 2)
            for (int j = 1; j <= n; ++j)
              for (int i = 0; i < j; ++i)
                r.faces = std::max(r.faces, dist(face_map(g, n - 1, i, face_map(g, n, j, x)),
                                                 face_map(g, n - 1, j - 1, face_map(g, n, i, x))));
          for (int j = 1; j <= n; ++j) {
            const Vec d = degeneracy_map(g, n, j, x);
            r.degeneracies = std::max(r.degeneracies, next->residual(d));
            r.degeneracies = std::max(r.degeneracies, dist(face_map(g, n + 1, j, d), x));
            r.degeneracies = std::max(r.degeneracies, dist(face_map(g, n + 1, j + 1, d), x));
            for (int i = 0; i <= n + 1; ++i) {
              if (i < j && j - 1 >= 1 && n - 1 >= 1)
                r.degeneracies = std::max(
                    r.degeneracies,
                    dist(face_map(g, n + 1, i, d), degeneracy_map(g, n - 1, j - 1, face_map(g, n, i, x))));
              if (i > j + 1 && j <= n - 1)
                r.degeneracies = std::max(
                    r.degeneracies,
                    dist(face_map(g, n + 1, i, d), degeneracy_map(g, n - 1, j, face_map(g, n, i - 1, x))));
            }
            for (int i = 1; i <= j; ++i)
              r.degeneracies =
                  std::max(r.degeneracies, dist(degeneracy_map(g, n + 1, i, d),
                                                degeneracy_map(g, n + 1, j + 1, degeneracy_map(g, n, i, x))));
          }
          if (n <= 2) {
            for (const auto& s : perms) {
              const Vec sx = sym_action(g, s, x);
              r.action = std::max(r.action, dist(sx, sym_action_lifted(g, s, x)));
              for (const auto& t : perms)
                r.action = std::max(r.action,
                                    dist(sym_action(g, s, sym_action(g, t, x)), sym_action(g, compose(s, t), x)));
            }
            r.action = std::max(r.action, dist(sym_action(g, perms.front(), x), x));
          }
          const Vec h = canonical_lift(g, n, x);
          r.gauge = dist(gauge_projection(g, n, h), x);
          const Vec src = g.s(h.head(arrow_dim(g)));
          const Vec k = g.inv(g.arrow_with_source(kseq.point(idx), src));
          const Vec hk = right_translate(g, h, k);
          r.gauge = std::max(r.gauge, dist(gauge_projection(g, n, hk), x));
          for (const auto& s : perms)
            r.gauge = std::max(r.gauge, dist(gauge_projection(g, n, permute_tuple(g, s, hk)),
                                             sym_action_lifted(g, s, x)));
          return r;
        },
        exec);
    std::vector<double> defects;
    for (const Row& r : rows) {
      defects.push_back(std::max({r.faces, r.degeneracies, r.action, r.gauge}));
      worst.faces = std::max(worst.faces, r.faces);
      worst.degeneracies = std::max(worst.degeneracies, r.degeneracies);
      worst.action = std::max(worst.action, r.action);
      worst.gauge = std::max(worst.gauge, r.gauge);
    }
    parts.push_back(Report::from_defects("level_" + std::to_string(n), std::move(defects), tol));
  }
  Report rep = merge_reports("check_simplicial", parts, tol);
  rep.details["groupoid"] = g.name;
  rep.details["faces"] = worst.faces;
  rep.details["degeneracies"] = worst.degeneracies;
  rep.details["action"] = worst.action;
  rep.details["gauge"] = worst.gauge;
  return rep;
}

}  // namespace lgkit
