#include "lgkit/smooth_map.hpp"

#include "lgkit/manifold.hpp"

namespace lgkit {

Mat SmoothMap::jacobian(const Vec& x, double h) const {
  if (jac_) return jac_(x);
  Mat j(out_dim_, in_dim_);
  Vec xp = x, xm = x;
  for (int k = 0; k < in_dim_; ++k) {
    xp(k) = x(k) + h;
    xm(k) = x(k) - h;
    j.col(k) = (f_(xp) - f_(xm)) / (2.0 * h);
    xp(k) = xm(k) = x(k);
  }
  return j;
}

Mat SmoothMap::differential(const Manifold& domain, const Vec& x, double h) const {
  if (jac_) return jac_(x) * domain.tangent_basis(x);
  auto chart = domain.chart_at(x);
  const int d = chart->dim();
  Mat j(out_dim_, d);
  Vec u = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    u(k) = h;
    Vec fp = f_(chart->point(u));
    u(k) = -h;
    Vec fm = f_(chart->point(u));
    u(k) = 0.0;
    j.col(k) = (fp - fm) / (2.0 * h);
  }
  return j;
}

SmoothMap SmoothMap::then(const SmoothMap& g) const {
  SmoothMap f = *this;
  EvalFn eval = [f, g](const Vec& x) { return g(f(x)); };
  JacFn jac;
  if (has_jacobian() && g.has_jacobian())
    jac = [f, g](const Vec& x) -> Mat { return g.jacobian(f(x)) * f.jacobian(x); };
  return SmoothMap(in_dim_, g.out_dim(), std::move(eval), std::move(jac));
}

SmoothMap SmoothMap::identity(int dim) {
  return SmoothMap(
      dim, dim, [](const Vec& x) { return x; },
      [dim](const Vec&) -> Mat { return Mat::Identity(dim, dim); });
}

SmoothMap SmoothMap::block(int in_dim, int offset, int size) {
  return SmoothMap(
      in_dim, size, [offset, size](const Vec& x) -> Vec { return x.segment(offset, size); },
      [in_dim, offset, size](const Vec&) -> Mat {
        Mat j = Mat::Zero(size, in_dim);
        j.block(0, offset, size, size).setIdentity();
        return j;
      });
}

SmoothMap SmoothMap::linear(const Mat& a) {
  return SmoothMap(
      static_cast<int>(a.cols()), static_cast<int>(a.rows()),
      [a](const Vec& x) -> Vec { return a * x; }, [a](const Vec&) -> Mat { return a; });
}

}  // namespace lgkit
