#include "lgkit/foliation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lgkit {

Vec lie_bracket(const VectorField& a, const VectorField& b, const Vec& x, double h) {
  const Vec ax = a(x);
  const Vec bx = b(x);
  // Directional derivatives along a(x) and b(x).
  const Vec db_a = (b(x + h * ax) - b(x - h * ax)) / (2 * h);
  const Vec da_b = (a(x + h * bx) - a(x - h * bx)) / (2 * h);
  return db_a - da_b;
}

Mat Foliation::frame(const Vec& x) const {
  Mat f(dim, leaf_dim() + codim());
  int c = 0;
  for (const auto& v : leaf) f.col(c++) = v(x);
  for (const auto& v : transverse) f.col(c++) = v(x);
  return f;
}

Vec Foliation::frame_coords(const Vec& x, const Vec& w) const {
  return frame(x).partialPivLu().solve(w);
}

Report involutivity_check(const Foliation& f, const std::vector<Vec>& points, double tol) {
  std::vector<double> defects;
  defects.reserve(points.size());
  for (const auto& x : points) {
    double worst = 0.0;
    for (int i = 0; i < f.leaf_dim(); ++i) {
      for (int j = i + 1; j < f.leaf_dim(); ++j) {
        const Vec c = f.frame_coords(x, lie_bracket(f.leaf[i], f.leaf[j], x));
        worst = std::max(worst, c.tail(f.codim()).cwiseAbs().maxCoeff());
      }
    }
    defects.push_back(worst);
  }
  return Report::from_defects("involutivity", std::move(defects), tol);
}

Vec LeafPath::tangent(double t) const {
  if (velocity) return velocity(t);
  const double h = 1e-6;
  const double lo = std::max(0.0, t - h);
  const double hi = std::min(1.0, t + h);
  return (point(hi) - point(lo)) / (hi - lo);
}

namespace {

Vec rk4_flow(const VectorField& v, Vec x, double time, int steps) {
  const double dt = time / steps;
  for (int k = 0; k < steps; ++k) {
    const Vec k1 = v(x);
    const Vec k2 = v(x + 0.5 * dt * k1);
    const Vec k3 = v(x + 0.5 * dt * k2);
    const Vec k4 = v(x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

// c' = -B(t) c: B_lj is the Y_l coordinate of [gamma', Y_j] at gamma(t),
// with gamma' expanded in the leafwise frame.
Mat bott_generator(const Foliation& f, const LeafPath& p, double t, double lo, double hi) {
  // One-sided at piece ends so velocity jumps at breaks are not straddled.
  const double eps = 1e-12 * std::max(1.0, hi - lo);
  t = std::clamp(t, lo + eps, hi - eps);
  const Vec x = p.at(t);
  const Vec a = f.frame_coords(x, p.tangent(t)).head(f.leaf_dim());
  const int q = f.codim();
  Mat b = Mat::Zero(q, q);
  for (int j = 0; j < q; ++j) {
    Vec br = Vec::Zero(f.dim);
    for (int i = 0; i < f.leaf_dim(); ++i) br += a(i) * lie_bracket(f.leaf[i], f.transverse[j], x);
    b.col(j) = f.frame_coords(x, br).tail(q);
  }
  return b;
}

void check_leafwise(const Foliation& f, const LeafPath& p, const TransportOptions& opt) {
  const int n = std::max(2, opt.tangency_samples);
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / (n - 1);
    const Vec w = p.tangent(t);
    const double len = w.norm();
    if (len == 0.0) continue;
    const Vec c = f.frame_coords(p.at(t), w);
    const double normal = c.tail(f.codim()).norm() / c.norm();
    if (!(normal < opt.leaf_tol)) {
      throw Error(ErrorCode::NotLeafwise, "path leaves the leaf at t=" + std::to_string(t) +
                                              " (normal part " + std::to_string(normal) + ")");
    }
  }
}

}  // namespace

LeafPath flow_path(const Foliation& f, const Vec& start,
                   const std::vector<std::pair<int, double>>& legs, int substeps) {
  if (legs.empty()) throw Error(ErrorCode::InvalidParams, "flow_path needs at least one leg");
  for (const auto& [i, len] : legs) {
    if (i < 0 || i >= f.leaf_dim()) throw Error(ErrorCode::IndexOutOfRange, "leaf field index");
  }
  std::vector<Vec> corners{start};
  for (const auto& [i, len] : legs) corners.push_back(rk4_flow(f.leaf[i], corners.back(), len, substeps));
  const int n = static_cast<int>(legs.size());
  auto locate = [n](double t) {
    const double s = std::clamp(t, 0.0, 1.0) * n;
    const int k = std::min(n - 1, static_cast<int>(std::floor(s)));
    return std::pair<int, double>{k, s - k};
  };
  LeafPath p;
  for (int k = 1; k < n; ++k) p.breaks.push_back(static_cast<double>(k) / n);
  p.point = [f, legs, corners, locate, substeps](double t) {
    const auto [k, u] = locate(t);
    const int steps = std::max(1, static_cast<int>(std::ceil(u * substeps)));
    return rk4_flow(f.leaf[legs[k].first], corners[k], u * legs[k].second, steps);
  };
  p.velocity = [f, legs, n, p_point = p.point, locate](double t) {
    const auto [k, u] = locate(t);
    (void)u;
    return Vec(n * legs[k].second * f.leaf[legs[k].first](p_point(t)));
  };
  return p;
}

LeafPath reparametrize(const LeafPath& p, std::function<double(double)> phi,
                       std::function<double(double)> dphi) {
  LeafPath r;
  r.point = [p, phi](double t) { return p.at(phi(t)); };
  r.velocity = [p, phi, dphi](double t) { return Vec(dphi(t) * p.tangent(phi(t))); };
  // Breaks move with the parameter; locate them by bisection on phi.
  for (double b : p.breaks) {
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < b ? lo : hi) = mid;
    }
    r.breaks.push_back(0.5 * (lo + hi));
  }
  return r;
}

Mat transport_matrix(const Foliation& f, const LeafPath& path, const TransportOptions& opt) {
  // The ODE is linear, so transport the identity columns together.
  const int q = f.codim();
  if (opt.steps < 1) throw Error(ErrorCode::StepCountInvalid, "transport needs steps >= 1");
  check_leafwise(f, path, opt);
  std::vector<double> knots{0.0};
  for (double b : path.breaks) {
    if (b > knots.back() && b < 1.0) knots.push_back(b);
  }
  knots.push_back(1.0);
  Mat c = Mat::Identity(q, q);
  for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
    const double lo = knots[piece];
    const double hi = knots[piece + 1];
    const int steps = std::max(1, static_cast<int>(std::ceil(opt.steps * (hi - lo))));
    const double dt = (hi - lo) / steps;
    for (int k = 0; k < steps; ++k) {
      const double t = lo + k * dt;
      const Mat b0 = bott_generator(f, path, t, lo, hi);
      const Mat bm = bott_generator(f, path, t + 0.5 * dt, lo, hi);
      const Mat b1 = bott_generator(f, path, t + dt, lo, hi);
      const Mat k1 = -b0 * c;
      const Mat k2 = -bm * (c + 0.5 * dt * k1);
      const Mat k3 = -bm * (c + 0.5 * dt * k2);
      const Mat k4 = -b1 * (c + dt * k3);
      c += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  return c;
}

Vec bott_transport(const Foliation& f, const LeafPath& path, const Vec& normal_coords,
                   const TransportOptions& opt) {
  if (normal_coords.size() != f.codim()) {
    throw Error(ErrorCode::InvalidParams, "normal vector has wrong dimension");
  }
  return transport_matrix(f, path, opt) * normal_coords;
}

Mat linear_holonomy(const Foliation& f, const LeafPath& loop, const std::optional<DeckMap>& deck,
                    const TransportOptions& opt) {
  const Vec x0 = loop.at(0.0);
  const Vec x1 = loop.at(1.0);
  const Vec back = deck ? deck->point(x1) : x1;
  if ((back - x0).norm() > 1e-8) {
    throw Error(ErrorCode::InvalidParams, "loop does not close (gap " +
                                              std::to_string((back - x0).norm()) + ")");
  }
  const Mat h = transport_matrix(f, loop, opt);
  if (!deck) return h;
  // Normal vectors at x1 carried to x0 by the deck differential.
  const int q = f.codim();
  const Mat d = deck->differential(x1);
  Mat out(q, q);
  for (int j = 0; j < q; ++j) {
    Vec w = Vec::Zero(f.dim);
    for (int l = 0; l < q; ++l) w += h(l, j) * f.transverse[l](x1);
    out.col(j) = f.frame_coords(x0, d * w).tail(q);
  }
  return out;
}

double rectangle_defect(const Foliation& f, const Vec& x, int i, int j, double side,
                        const TransportOptions& opt) {
  const LeafPath p = flow_path(f, x, {{i, side}, {j, side}, {i, -side}, {j, -side}});
  const Mat h = transport_matrix(f, p, opt);
  return (h - Mat::Identity(h.rows(), h.cols())).cwiseAbs().maxCoeff();
}

namespace foliations {

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}
}  // namespace

Foliation horizontal_lines() {
  Foliation f;
  f.name = "horizontal_lines";
  f.dim = 2;
  f.leaf = {[](const Vec&) { return v2(1, 0); }};
  f.transverse = {[](const Vec&) { return v2(0, 1); }};
  return f;
}

Foliation mobius_cover() {
  Foliation f;
  f.name = "mobius_cover";
  f.dim = 2;
  f.leaf = {[](const Vec& x) { return v2(1, std::sin(x(0)) * x(1)); }};
  f.transverse = {[](const Vec&) { return v2(0, 1); }};
  return f;
}

DeckMap mobius_deck(int circuits) {
  const double sign = circuits % 2 == 0 ? 1.0 : -1.0;
  const double shift = 2 * std::numbers::pi * circuits;
  DeckMap d;
  d.point = [sign, shift](const Vec& x) { return v2(x(0) - shift, sign * x(1)); };
  d.differential = [sign](const Vec&) {
    Mat m = Mat::Identity(2, 2);
    m(1, 1) = sign;
    return m;
  };
  return d;
}

LeafPath mobius_loop(double theta0, double y0, int circuits) {
  // Leaves of the cover: y = c exp(-cos theta).
  const double c = y0 * std::exp(std::cos(theta0));
  const double span = 2 * std::numbers::pi * circuits;
  LeafPath p;
  p.point = [=](double t) {
    const double th = theta0 + span * t;
    return v2(th, c * std::exp(-std::cos(th)));
  };
  p.velocity = [=](double t) {
    const double th = theta0 + span * t;
    return v2(span, span * std::sin(th) * c * std::exp(-std::cos(th)));
  };
  return p;
}

Foliation twisted_planes() {
  Foliation f;
  f.name = "twisted_planes";
  f.dim = 3;
  f.leaf = {[](const Vec& x) { return v3(1, 0, x(2) * x(1)); },
            [](const Vec&) { return v3(0, 1, 0); }};
  f.transverse = {[](const Vec&) { return v3(0, 0, 1); }};
  return f;
}

}  // namespace foliations

}  // namespace lgkit
