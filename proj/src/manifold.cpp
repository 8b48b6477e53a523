#include "lgkit/manifold.hpp"

#include "lgkit/linalg.hpp"
#include "lgkit/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <sstream>

namespace lgkit {

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::euclidean: return "euclidean";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::matrix_group: return "matrix-group";
    case ManifoldKind::finite_set: return "finite-set";
    case ManifoldKind::product: return "product";
    case ManifoldKind::fiber_product: return "fiber-product";
    case ManifoldKind::vector_bundle: return "vector-bundle-total-space";
  }
  return "unknown";
}

Mat Manifold::projector(const Vec& x) const {
  const Mat b = tangent_basis(x);
  return b * b.transpose();
}

Vec Manifold::sample(std::span<const double>) const {
  throw Error(ErrorCode::SamplingFailure, "no sampler for " + describe());
}

std::vector<Vec> sample_points(const Manifold& m, std::size_t count, std::uint64_t seed) {
  LowDiscrepancy seq(std::max(1, m.sample_dim()), seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto u = seq.point(i);
    out.push_back(m.sample(std::span<const double>(u.data(), m.sample_dim())));
  }
  return out;
}

namespace {

void check_capture(const Vec& x, const Vec& p, double capture_radius) {
  if (!p.allFinite() || (p - x).norm() > capture_radius) {
    std::ostringstream os;
    os << "distance " << (p - x).norm() << " exceeds capture radius " << capture_radius;
    throw Error(ErrorCode::CaptureRadiusExceeded, os.str());
  }
}

// ---------------------------------------------------------------- Euclidean

class AffineChart final : public Chart {
 public:
  explicit AffineChart(Vec x) : x_(std::move(x)) {}
  int dim() const override { return static_cast<int>(x_.size()); }
  const Vec& center() const override { return x_; }
  Vec point(const Vec& u) const override { return x_ + u; }
  Mat jacobian(const Vec&) const override { return Mat::Identity(x_.size(), x_.size()); }
  Vec coords(const Vec& y) const override { return y - x_; }

 private:
  Vec x_;
};

// ---------------------------------------------------------------- Sphere

class SphereChart final : public Chart {
 public:
  SphereChart(Vec x, Mat b) : x_(std::move(x)), b_(std::move(b)) {}
  int dim() const override { return static_cast<int>(b_.cols()); }
  const Vec& center() const override { return x_; }
  Vec point(const Vec& u) const override {
    Vec z = x_ + b_ * u;
    return z / z.norm();
  }
  Mat jacobian(const Vec& u) const override {
    Vec z = x_ + b_ * u;
    const double r = z.norm();
    Vec y = z / r;
    return (Mat::Identity(y.size(), y.size()) - y * y.transpose()) * b_ / r;
  }
  Vec coords(const Vec& y) const override {
    const double c = x_.dot(y);
    if (c <= 1e-12) throw Error(ErrorCode::ChartEscape, "point outside sphere chart hemisphere");
    return b_.transpose() * y / c;
  }

 private:
  Vec x_;
  Mat b_;
};

// ---------------------------------------------------------------- SO(n)

class RotationChart final : public Chart {
 public:
  RotationChart(Vec x, int n, const std::vector<Mat>* basis)
      : x_(std::move(x)), n_(n), basis_(basis), xm_(SpecialOrthogonal::to_matrix(x_, n)) {}

  int dim() const override { return static_cast<int>(basis_->size()); }
  const Vec& center() const override { return x_; }

  Vec point(const Vec& u) const override {
    if (n_ == 2) {
      const double th = u(0) / std::sqrt(2.0);
      Mat r(2, 2);
      r << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
      return SpecialOrthogonal::to_vec(xm_ * r);
    }
    return SpecialOrthogonal::to_vec(xm_ * skew(u).exp());
  }

  Mat jacobian(const Vec& u) const override {
    const auto d = basis_->size();
    Mat jac(n_ * n_, d);
    if (n_ == 2) {
      const double th = u(0) / std::sqrt(2.0);
      Mat dr(2, 2);
      dr << -std::sin(th), std::cos(th), -std::cos(th), -std::sin(th);
      jac.col(0) = SpecialOrthogonal::to_vec(xm_ * dr / std::sqrt(2.0));
      return jac;
    }
    // d exp(A)[E] is the upper-right block of exp([[A, E], [0, A]]).
    const Mat a = skew(u);
    for (std::size_t k = 0; k < d; ++k) {
      Mat big = Mat::Zero(2 * n_, 2 * n_);
      big.topLeftCorner(n_, n_) = a;
      big.bottomRightCorner(n_, n_) = a;
      big.topRightCorner(n_, n_) = (*basis_)[k] / std::sqrt(2.0);
      Mat e = big.exp();
      jac.col(static_cast<Eigen::Index>(k)) = SpecialOrthogonal::to_vec(xm_ * e.topRightCorner(n_, n_));
    }
    return jac;
  }

  Vec coords(const Vec& y) const override {
    const Mat rel = xm_.transpose() * SpecialOrthogonal::to_matrix(y, n_);
    Vec u(basis_->size());
    if (n_ == 2) {
      u(0) = std::sqrt(2.0) * std::atan2(rel(0, 1), rel(0, 0));
      return u;
    }
    const Mat l = rel.log();
    std::size_t k = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) u(static_cast<Eigen::Index>(k++)) = std::sqrt(2.0) * l(i, j);
    return u;
  }

 private:
  Mat skew(const Vec& u) const {
    Mat a = Mat::Zero(n_, n_);
    for (std::size_t k = 0; k < basis_->size(); ++k)
      a += u(static_cast<Eigen::Index>(k)) * (*basis_)[k] / std::sqrt(2.0);
    return a;
  }

  Vec x_;
  int n_;
  const std::vector<Mat>* basis_;
  Mat xm_;
};

// ---------------------------------------------------------------- finite set

class PointChart final : public Chart {
 public:
  explicit PointChart(Vec x) : x_(std::move(x)) {}
  int dim() const override { return 0; }
  const Vec& center() const override { return x_; }
  Vec point(const Vec&) const override { return x_; }
  Mat jacobian(const Vec&) const override { return Mat(x_.size(), 0); }
  Vec coords(const Vec&) const override { return Vec(0); }

 private:
  Vec x_;
};

// ---------------------------------------------------------------- product

class ProductChart final : public Chart {
 public:
  ProductChart(Vec x, std::vector<std::unique_ptr<Chart>> charts, std::vector<int> amb_offsets)
      : x_(std::move(x)), charts_(std::move(charts)), amb_(std::move(amb_offsets)) {
    int off = 0;
    for (const auto& c : charts_) {
      dim_off_.push_back(off);
      off += c->dim();
    }
    dim_ = off;
  }

  int dim() const override { return dim_; }
  const Vec& center() const override { return x_; }

  Vec point(const Vec& u) const override {
    Vec y(x_.size());
    for (std::size_t i = 0; i < charts_.size(); ++i) {
      const auto& c = charts_[i];
      Vec p = c->point(u.segment(dim_off_[i], c->dim()));
      y.segment(amb_[i], p.size()) = p;
    }
    return y;
  }

  Mat jacobian(const Vec& u) const override {
    Mat jac = Mat::Zero(x_.size(), dim_);
    for (std::size_t i = 0; i < charts_.size(); ++i) {
      const auto& c = charts_[i];
      Mat j = c->jacobian(u.segment(dim_off_[i], c->dim()));
      jac.block(amb_[i], dim_off_[i], j.rows(), j.cols()) = j;
    }
    return jac;
  }

  Vec coords(const Vec& y) const override {
    Vec u(dim_);
    for (std::size_t i = 0; i < charts_.size(); ++i) {
      const auto& c = charts_[i];
      u.segment(dim_off_[i], c->dim()) = c->coords(y.segment(amb_[i], c->center().size()));
    }
    return u;
  }

 private:
  Vec x_;
  std::vector<std::unique_ptr<Chart>> charts_;
  std::vector<int> amb_;
  std::vector<int> dim_off_;
  int dim_ = 0;
};

// ---------------------------------------------------------------- constrained

// point(u) = psi(Bn u + W w(u)) where psi is the base chart and w(u) solves
// c(psi(.)) = 0 by Gauss-Newton.
class ConstrainedChart final : public Chart {
 public:
  ConstrainedChart(Vec x, std::unique_ptr<Chart> base, const SmoothMap* c, Mat bn, Mat w)
      : x_(std::move(x)), base_(std::move(base)), c_(c), bn_(std::move(bn)), w_(std::move(w)) {}

  int dim() const override { return static_cast<int>(bn_.cols()); }
  const Vec& center() const override { return x_; }

  Vec point(const Vec& u) const override { return base_->point(solve(u)); }

  Mat jacobian(const Vec& u) const override {
    const Vec a = solve(u);
    const Vec y = base_->point(a);
    const Mat jpsi = base_->jacobian(a);
    const Mat jc = c_->jacobian(y) * jpsi;
    if (w_.cols() == 0) return jpsi * bn_;
    const Mat dw = -linalg::pinv(jc * w_) * (jc * bn_);
    return jpsi * (bn_ + w_ * dw);
  }

  Vec coords(const Vec& y) const override { return bn_.transpose() * base_->coords(y); }

 private:
  Vec solve(const Vec& u) const {
    Vec a = bn_ * u;
    if (w_.cols() == 0) return a;
    Vec w = Vec::Zero(w_.cols());
    for (int it = 0; it < 60; ++it) {
      const Vec y = base_->point(a + w_ * w);
      const Vec c = (*c_)(y);
      if (c.norm() <= 1e-15 * std::max(1.0, y.norm())) return a + w_ * w;
      const Mat jw = c_->jacobian(y) * base_->jacobian(a + w_ * w) * w_;
      const Vec step = -linalg::pinv(jw) * c;
      w += step;
      if (step.norm() <= 1e-16 * std::max(1.0, w.norm())) break;
    }
    const Vec y = base_->point(a + w_ * w);
    if ((*c_)(y).norm() > 1e-10)
      throw Error(ErrorCode::ChartEscape, "constraint solve did not converge in chart");
    return a + w_ * w;
  }

  Vec x_;
  std::unique_ptr<Chart> base_;
  const SmoothMap* c_;
  Mat bn_;
  Mat w_;
};

}  // namespace

// ------------------------------------------------------------------ Euclidean

std::string EuclideanSpace::describe() const { return "R^" + std::to_string(n_); }

double EuclideanSpace::residual(const Vec& x) const {
  return x.size() == n_ && x.allFinite() ? 0.0 : std::numeric_limits<double>::infinity();
}

Mat EuclideanSpace::tangent_basis(const Vec&) const { return Mat::Identity(n_, n_); }

Vec EuclideanSpace::project(const Vec& x, double) const { return x; }

std::unique_ptr<Chart> EuclideanSpace::chart_at(const Vec& x) const {
  return std::make_unique<AffineChart>(x);
}

Vec EuclideanSpace::sample(std::span<const double> u) const {
  Vec x(n_);
  for (int i = 0; i < n_; ++i) x(i) = extent_ * (2.0 * u[i] - 1.0);
  return x;
}

// ------------------------------------------------------------------ Sphere

std::string Sphere::describe() const {
  return n_ == 2 ? "S^1" : "S^" + std::to_string(n_ - 1);
}

double Sphere::residual(const Vec& x) const { return std::abs(x.norm() - 1.0); }

Mat Sphere::tangent_basis(const Vec& x) const {
  const Vec y = x / x.norm();
  if (n_ == 2) {
    Mat b(2, 1);
    b << -y(1), y(0);
    return b;
  }
  return linalg::orthonormal_complement(y);
}

Vec Sphere::project(const Vec& x, double capture_radius) const {
  const double r = x.norm();
  if (r < 1e-300) throw Error(ErrorCode::CaptureRadiusExceeded, "origin has no nearest sphere point");
  Vec p = x / r;
  check_capture(x, p, capture_radius);
  return p;
}

std::unique_ptr<Chart> Sphere::chart_at(const Vec& x) const {
  return std::make_unique<SphereChart>(x, tangent_basis(x));
}

Vec Sphere::sample(std::span<const double> u) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Vec x(n_);
  if (n_ == 2) {
    x << std::cos(two_pi * u[0]), std::sin(two_pi * u[0]);
    return x;
  }
  if (n_ == 3) {
    const double z = 2.0 * u[0] - 1.0;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    x << r * std::cos(two_pi * u[1]), r * std::sin(two_pi * u[1]), z;
    return x;
  }
  // Box-Muller pairs, normalized.
  for (int i = 0; i < n_; i += 2) {
    const double rad = std::sqrt(-2.0 * std::log(std::max(1e-300, u[i])));
    x(i) = rad * std::cos(two_pi * u[i + 1]);
    if (i + 1 < n_) x(i + 1) = rad * std::sin(two_pi * u[i + 1]);
  }
  return x / x.norm();
}

// ------------------------------------------------------------------ SO(n)

SpecialOrthogonal::SpecialOrthogonal(int n) : n_(n) {
  if (n < 2) throw Error(ErrorCode::InvalidParams, "SO(n) needs n >= 2");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = -1.0;
      basis_.push_back(e);
    }
}

Mat SpecialOrthogonal::to_matrix(const Vec& x, int n) {
  return Eigen::Map<const Mat>(x.data(), n, n);
}

Vec SpecialOrthogonal::to_vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

std::string SpecialOrthogonal::describe() const { return "SO(" + std::to_string(n_) + ")"; }

double SpecialOrthogonal::residual(const Vec& x) const {
  const Mat m = to_matrix(x, n_);
  return (m.transpose() * m - Mat::Identity(n_, n_)).norm() + std::abs(m.determinant() - 1.0);
}

Mat SpecialOrthogonal::tangent_basis(const Vec& x) const {
  const Mat m = to_matrix(x, n_);
  Mat b(n_ * n_, basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k)
    b.col(static_cast<Eigen::Index>(k)) = to_vec(m * basis_[k] / std::sqrt(2.0));
  return b;
}

Vec SpecialOrthogonal::project(const Vec& x, double capture_radius) const {
  const Mat m = to_matrix(x, n_);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat u = svd.matrixU();
  const Mat v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(n_ - 1) *= -1.0;
  Vec p = to_vec(u * v.transpose());
  check_capture(x, p, capture_radius);
  return p;
}

std::unique_ptr<Chart> SpecialOrthogonal::chart_at(const Vec& x) const {
  return std::make_unique<RotationChart>(x, n_, &basis_);
}

Vec SpecialOrthogonal::sample(std::span<const double> u) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (n_ == 2) {
    const double th = two_pi * u[0];
    Mat r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return to_vec(r);
  }
  if (n_ == 3) {
    // Uniform unit quaternion (Shoemake).
    const double a = std::sqrt(1.0 - u[0]), b = std::sqrt(u[0]);
    const double w = a * std::sin(two_pi * u[1]), x = a * std::cos(two_pi * u[1]);
    const double y = b * std::sin(two_pi * u[2]), z = b * std::cos(two_pi * u[2]);
    Mat r(3, 3);
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
        2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
        2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
    return to_vec(r);
  }
  throw Error(ErrorCode::SamplingFailure, "no sampler for SO(n), n > 3");
}

// ------------------------------------------------------------------ finite set

FiniteSet::FiniteSet(std::vector<Vec> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::InvalidParams, "finite set needs at least one point");
}

std::string FiniteSet::describe() const {
  return "finite set of " + std::to_string(points_.size()) + " points";
}

double FiniteSet::residual(const Vec& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) best = std::min(best, (p - x).norm());
  return best;
}

Mat FiniteSet::tangent_basis(const Vec& x) const { return Mat(x.size(), 0); }

Vec FiniteSet::project(const Vec& x, double capture_radius) const {
  const Vec* best = &points_.front();
  for (const auto& p : points_)
    if ((p - x).norm() < (*best - x).norm()) best = &p;
  check_capture(x, *best, capture_radius);
  return *best;
}

std::unique_ptr<Chart> FiniteSet::chart_at(const Vec& x) const {
  return std::make_unique<PointChart>(project(x, kDefaultCaptureRadius));
}

Vec FiniteSet::sample(std::span<const double> u) const {
  auto k = static_cast<std::size_t>(u[0] * static_cast<double>(points_.size()));
  return points_[std::min(k, points_.size() - 1)];
}

// ------------------------------------------------------------------ product

ProductManifold::ProductManifold(std::vector<ManifoldPtr> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error(ErrorCode::InvalidParams, "empty product");
  for (const auto& f : factors_) {
    offsets_.push_back(ambient_);
    ambient_ += f->ambient_dim();
    dim_ += f->dim();
  }
}

std::string ProductManifold::describe() const {
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += " x ";
    s += factors_[i]->describe();
  }
  return s;
}

double ProductManifold::residual(const Vec& x) const {
  if (x.size() != ambient_) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    r = std::max(r, factors_[i]->residual(x.segment(offsets_[i], factors_[i]->ambient_dim())));
  return r;
}

Mat ProductManifold::tangent_basis(const Vec& x) const {
  Mat b = Mat::Zero(ambient_, dim_);
  int col = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    Mat bi = f->tangent_basis(x.segment(offsets_[i], f->ambient_dim()));
    b.block(offsets_[i], col, bi.rows(), bi.cols()) = bi;
    col += f->dim();
  }
  return b;
}

Vec ProductManifold::project(const Vec& x, double capture_radius) const {
  Vec p(ambient_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    p.segment(offsets_[i], f->ambient_dim()) =
        f->project(x.segment(offsets_[i], f->ambient_dim()), capture_radius);
  }
  check_capture(x, p, capture_radius);
  return p;
}

std::unique_ptr<Chart> ProductManifold::chart_at(const Vec& x) const {
  std::vector<std::unique_ptr<Chart>> charts;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    charts.push_back(f->chart_at(x.segment(offsets_[i], f->ambient_dim())));
  }
  return std::make_unique<ProductChart>(x, std::move(charts), offsets_);
}

double ProductManifold::chart_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& f : factors_) r = std::min(r, f->chart_radius());
  return r;
}

int ProductManifold::sample_dim() const {
  int s = 0;
  for (const auto& f : factors_) s += f->sample_dim();
  return s;
}

Vec ProductManifold::sample(std::span<const double> u) const {
  Vec x(ambient_);
  std::size_t k = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    const auto sd = static_cast<std::size_t>(f->sample_dim());
    x.segment(offsets_[i], f->ambient_dim()) = f->sample(u.subspan(k, sd));
    k += sd;
  }
  return x;
}

// ------------------------------------------------------------------ constrained

ConstrainedManifold::ConstrainedManifold(ManifoldPtr base, SmoothMap constraint, int dim,
                                         std::string name, ManifoldKind kind, Sampler sampler,
                                         int sample_dim)
    : base_(std::move(base)),
      constraint_(std::move(constraint)),
      dim_(dim),
      name_(std::move(name)),
      kind_(kind),
      sampler_(std::move(sampler)),
      sample_dim_(sample_dim) {}

double ConstrainedManifold::residual(const Vec& x) const {
  return std::max(base_->residual(x), constraint_(x).norm());
}

Mat ConstrainedManifold::tangent_basis(const Vec& x) const {
  const Mat bb = base_->tangent_basis(x);
  const Mat n = linalg::null_space(constraint_.jacobian(x) * bb);
  if (n.cols() != dim_)
    throw Error(ErrorCode::RankDeficient, name_ + ": constraint rank changed, tangent dim " +
                                              std::to_string(n.cols()) + " != " +
                                              std::to_string(dim_));
  return bb * n;
}

Vec ConstrainedManifold::project(const Vec& x, double capture_radius) const {
  Vec y = base_->project(x, capture_radius);
  for (int it = 0; it < 60; ++it) {
    const Vec c = constraint_(y);
    if (c.norm() <= 1e-15 * std::max(1.0, y.norm())) break;
    auto chart = base_->chart_at(y);
    const Mat a = constraint_.jacobian(y) * chart->jacobian(Vec::Zero(chart->dim()));
    const Vec step = -linalg::pinv(a) * c;
    y = chart->point(step);
    if (step.norm() <= 1e-16) break;
  }
  if (constraint_(y).norm() > 1e-10)
    throw Error(ErrorCode::CaptureRadiusExceeded, name_ + ": projection did not converge");
  check_capture(x, y, capture_radius);
  return y;
}

std::unique_ptr<Chart> ConstrainedManifold::chart_at(const Vec& x) const {
  auto base_chart = base_->chart_at(x);
  const Mat a = constraint_.jacobian(x) * base_chart->jacobian(Vec::Zero(base_chart->dim()));
  Mat bn = linalg::null_space(a);
  if (bn.cols() != dim_)
    throw Error(ErrorCode::ChartEscape, name_ + ": constraint rank changed at chart centre");
  Mat w = linalg::orthonormal_complement(bn);
  return std::make_unique<ConstrainedChart>(x, std::move(base_chart), &constraint_, std::move(bn),
                                            std::move(w));
}

Vec ConstrainedManifold::sample(std::span<const double> u) const {
  if (!sampler_) return Manifold::sample(u);
  return sampler_(u);
}

}  // namespace lgkit
