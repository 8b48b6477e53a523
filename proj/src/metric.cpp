#include "lgkit/metric.hpp"

#include "lgkit/linalg.hpp"

#include <cmath>

namespace lgkit {

Mat Metric::tangent_form(const Vec& x) const {
  const Mat b = manifold->tangent_basis(x);
  return linalg::symmetrize(b.transpose() * eval(x) * b);
}

Metric Metric::euclidean(ManifoldPtr m) {
  const int n = m->ambient_dim();
  return Metric{std::move(m), [n](const Vec&) -> Mat { return Mat::Identity(n, n); }, "euclidean"};
}

Metric Metric::scaled(const Metric& g, double factor) {
  auto eval = g.eval;
  return Metric{g.manifold, [eval, factor](const Vec& x) -> Mat { return factor * eval(x); },
                g.name + "*" + std::to_string(factor)};
}

Metric Metric::pullback(const Metric& g, const SmoothMap& f) {
  auto eval = g.eval;
  return Metric{g.manifold,
                [eval, f](const Vec& x) -> Mat {
                  const Mat j = f.jacobian(x);
                  return j.transpose() * eval(f(x)) * j;
                },
                "pullback(" + g.name + ")"};
}

// ------------------------------------------------------------------ geodesics

namespace {

class ChartGeodesic {
 public:
  ChartGeodesic(const Metric& g, double h) : g_(g), h_(h) {}

  void recentre(const Vec& x) { chart_ = g_.manifold->chart_at(x); }
  const Chart& chart() const { return *chart_; }

  Mat coeff(const Vec& u) const {
    const Mat j = chart_->jacobian(u);
    return j.transpose() * g_.eval(chart_->point(u)) * j;
  }

  Vec accel(const Vec& u, const Vec& v) const {
    const auto d = u.size();
    const Mat g0 = coeff(u);
    std::vector<Mat> dg(static_cast<std::size_t>(d));
    Vec e = u;
    for (Eigen::Index k = 0; k < d; ++k) {
      e(k) = u(k) + h_;
      Mat gp = coeff(e);
      e(k) = u(k) - h_;
      Mat gm = coeff(e);
      e(k) = u(k);
      dg[static_cast<std::size_t>(k)] = (gp - gm) / (2.0 * h_);
    }
    // w_l = sum_i v_i (d_i g v)_l - 1/2 v^T (d_l g) v ; accel = -g^{-1} w
    Vec w = Vec::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) w += v(i) * (dg[static_cast<std::size_t>(i)] * v);
    for (Eigen::Index l = 0; l < d; ++l) w(l) -= 0.5 * v.dot(dg[static_cast<std::size_t>(l)] * v);
    return -g0.ldlt().solve(w);
  }

 private:
  const Metric& g_;
  double h_;
  std::unique_ptr<Chart> chart_;
};

GeodesicPath integrate(const Metric& g, const Vec& base, const Vec& vec, int steps,
                       const GeodesicOptions& opt, bool record) {
  if (steps < 1) throw Error(ErrorCode::StepCountInvalid, "step_count must be >= 1");
  GeodesicPath path;
  const int d = g.manifold->dim();
  if (d == 0) {
    path.points.push_back(base);
    path.speeds.push_back(0.0);
    return path;
  }

  ChartGeodesic geo(g, opt.fd_step);
  geo.recentre(base);
  Vec u = Vec::Zero(d);
  Vec v = geo.chart().jacobian(u).transpose() * vec;
  const double half_radius = 0.5 * g.manifold->chart_radius();
  const double dt = 1.0 / steps;

  auto store = [&]() {
    path.points.push_back(geo.chart().point(u));
    path.speeds.push_back(std::sqrt(std::max(0.0, v.dot(geo.coeff(u) * v))));
  };
  if (record) store();

  for (int s = 0; s < steps; ++s) {
    const Vec k1u = v;
    const Vec k1v = geo.accel(u, v);
    const Vec k2u = v + 0.5 * dt * k1v;
    const Vec k2v = geo.accel(u + 0.5 * dt * k1u, k2u);
    const Vec k3u = v + 0.5 * dt * k2v;
    const Vec k3v = geo.accel(u + 0.5 * dt * k2u, k3u);
    const Vec k4u = v + dt * k3v;
    const Vec k4v = geo.accel(u + dt * k3u, k4u);
    u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (!u.allFinite() || !v.allFinite())
      throw Error(ErrorCode::ChartEscape, "geodesic integration diverged");

    if (u.norm() > half_radius && s + 1 < steps) {
      const Vec y = geo.chart().point(u);
      const Vec amb = geo.chart().jacobian(u) * v;
      if (!g.manifold->contains(y, 1e-6))
        throw Error(ErrorCode::ChartEscape, "re-charting left the manifold");
      geo.recentre(y);
      u = Vec::Zero(d);
      v = geo.chart().jacobian(u).transpose() * amb;
    }
    if (record) store();
  }
  if (!record) path.points.push_back(geo.chart().point(u));
  return path;
}

}  // namespace

int default_step_count(const Metric& g, const Vec& base, const Vec& vec, const GeodesicOptions& opt) {
  const double len = g.norm(base, vec);
  return std::max(1, static_cast<int>(std::ceil(opt.steps_per_unit * len)));
}

Vec geodesic_exp(const Metric& g, const Vec& base, const Vec& vec, int step_count,
                 const GeodesicOptions& opt) {
  return integrate(g, base, vec, step_count, opt, false).end();
}

Vec geodesic_exp(const Metric& g, const Vec& base, const Vec& vec) {
  return geodesic_exp(g, base, vec, default_step_count(g, base, vec));
}

GeodesicPath geodesic_path(const Metric& g, const Vec& base, const Vec& vec, int step_count,
                           const GeodesicOptions& opt) {
  return integrate(g, base, vec, step_count, opt, true);
}

// ------------------------------------------------------------------ submersions

namespace {

// S = A G_T^{-1} A^T: inverse of the pushforward form in base tangent coords.
Mat horizontal_inverse_form(const SmoothMap& f, const Metric& g_total, const Mat& base_basis,
                            const Vec& x) {
  const Mat gt = g_total.tangent_form(x);
  const Mat a = base_basis.transpose() * f.differential(*g_total.manifold, x);
  if (linalg::numerical_rank(a) < base_basis.cols())
    throw Error(ErrorCode::RankDeficient, "differential is not onto the base tangent space");
  return linalg::symmetrize(a * gt.ldlt().solve(a.transpose()));
}

}  // namespace

double submersion_defect(const SmoothMap& f, const Metric& g_total, const Metric& g_base,
                         const Vec& x) {
  const Vec y = f(x);
  const Mat bb = g_base.manifold->tangent_basis(y);
  if (bb.cols() == 0) return 0.0;
  const Mat s = horizontal_inverse_form(f, g_total, bb, x);
  const Mat gb = linalg::symmetrize(bb.transpose() * g_base.eval(y) * bb);
  Eigen::LLT<Mat> llt(gb);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::RankDeficient, "base metric is not positive-definite");
  const Mat l = llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(linalg::symmetrize(l.transpose() * s * l),
                                        Eigen::EigenvaluesOnly);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    worst = std::max(worst, std::abs(std::sqrt(std::max(0.0, es.eigenvalues()(i))) - 1.0));
  return worst;
}

Report riemannian_submersion_check(const SmoothMap& f, const Metric& g_total,
                                   const Metric& g_base, const std::vector<Vec>& samples,
                                   double tol, Exec exec) {
  auto defects = sample_map(
      samples.size(), [&](std::size_t i) { return submersion_defect(f, g_total, g_base, samples[i]); },
      exec);
  return Report::from_defects("riemannian_submersion_check", std::move(defects), tol);
}

Mat pushforward_metric(const SmoothMap& f, const Metric& g_total, const Manifold& base,
                       const Vec& y, const Vec& fiber_point) {
  const Mat bb = base.tangent_basis(y);
  if (bb.cols() == 0) return Mat::Zero(y.size(), y.size());
  const Mat s = horizontal_inverse_form(f, g_total, bb, fiber_point);
  const Mat gb = linalg::symmetrize(s.ldlt().solve(Mat::Identity(s.rows(), s.cols())));
  return bb * gb * bb.transpose();
}

Metric pushforward_along(const SmoothMap& f, const Metric& g_total, ManifoldPtr base,
                         std::function<Vec(const Vec&)> lift, std::string name) {
  ManifoldPtr keep = base;
  return Metric{std::move(base),
                [f, g_total, keep, lift = std::move(lift)](const Vec& y) -> Mat {
                  return pushforward_metric(f, g_total, *keep, y, lift(y));
                },
                std::move(name)};
}

}  // namespace lgkit
