#pragma once

#include "lgkit/manifold.hpp"
#include "lgkit/parallel.hpp"
#include "lgkit/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lgkit {

/// Point-dependent symmetric form on a manifold. eval(x) is an N x N
/// ambient matrix; only its restriction to T_x M is meaningful.
struct Metric {
  ManifoldPtr manifold;
  std::function<Mat(const Vec&)> eval;
  std::string name;

  Mat at(const Vec& x) const { return eval(x); }
  /// Gram matrix B^T G B in the tangent basis of the manifold at x.
  Mat tangent_form(const Vec& x) const;
  double norm(const Vec& x, const Vec& v) const { return std::sqrt(v.dot(eval(x) * v)); }

  /// Restriction of the ambient Euclidean inner product.
  static Metric euclidean(ManifoldPtr m);
  static Metric scaled(const Metric& g, double factor);
  /// Pullback along a diffeomorphism f of the manifold onto itself.
  static Metric pullback(const Metric& g, const SmoothMap& f);
};

struct GeodesicOptions {
  double fd_step = kFdStep;
  int steps_per_unit = 64;
};

struct GeodesicPath {
  std::vector<Vec> points;
  /// |gamma'(t)|_g at each stored point.
  std::vector<double> speeds;
  Vec end() const { return points.back(); }
};

/// Default step count: steps_per_unit per unit g-length, at least 1.
int default_step_count(const Metric& g, const Vec& base, const Vec& vec,
                       const GeodesicOptions& opt = {});

/// gamma(1) for the g-geodesic with gamma(0) = base, gamma'(0) = vec.
/// Integrates the geodesic equation in charts with Christoffel symbols from
/// central differences of the chart metric, classical RK4, re-charting when
/// the chart parameter leaves the half-radius ball.
Vec geodesic_exp(const Metric& g, const Vec& base, const Vec& vec, int step_count,
                 const GeodesicOptions& opt = {});
Vec geodesic_exp(const Metric& g, const Vec& base, const Vec& vec);

GeodesicPath geodesic_path(const Metric& g, const Vec& base, const Vec& vec, int step_count,
                           const GeodesicOptions& opt = {});

/// Operator-norm defect of df restricted to the g_total-orthogonal
/// complement of ker df against an isometry onto (T N, g_base).
/// Throws RankDeficient when df is not onto.
double submersion_defect(const SmoothMap& f, const Metric& g_total, const Metric& g_base,
                         const Vec& x);

Report riemannian_submersion_check(const SmoothMap& f, const Metric& g_total,
                                   const Metric& g_base, const std::vector<Vec>& samples,
                                   double tol = kVerifyTol, Exec exec = Exec::parallel);

/// Metric on the base at y = f(fiber_point) making df an isometry on the
/// horizontal space at fiber_point. Returns the ambient N_base x N_base form.
Mat pushforward_metric(const SmoothMap& f, const Metric& g_total, const Manifold& base,
                       const Vec& y, const Vec& fiber_point);

/// Metric on `base` whose value at y is the pushforward taken at lift(y).
Metric pushforward_along(const SmoothMap& f, const Metric& g_total, ManifoldPtr base,
                         std::function<Vec(const Vec&)> lift, std::string name);

}  // namespace lgkit
