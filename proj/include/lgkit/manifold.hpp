#pragma once

#include "lgkit/smooth_map.hpp"
#include "lgkit/types.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lgkit {

enum class ManifoldKind {
  euclidean,
  sphere,
  matrix_group,
  finite_set,
  product,
  fiber_product,
  vector_bundle,
};

const char* to_string(ManifoldKind kind);

/// Local parametrization u -> point(u) from a ball in R^d onto the manifold.
/// Invariants: point(0) == center() and jacobian(0) == tangent_basis(center()).
class Chart {
 public:
  virtual ~Chart() = default;
  virtual int dim() const = 0;
  virtual const Vec& center() const = 0;
  virtual Vec point(const Vec& u) const = 0;
  /// N x d differential of point() at u.
  virtual Mat jacobian(const Vec& u) const = 0;
  /// Inverse of point() on its image.
  virtual Vec coords(const Vec& y) const = 0;
};

/// Embedded manifold in R^N. Tangent spaces are handled through an
/// ambient-orthonormal basis; the projector is B B^T.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual int ambient_dim() const = 0;
  virtual int dim() const = 0;
  virtual std::string describe() const = 0;

  /// Constraint violation; zero on the manifold.
  virtual double residual(const Vec& x) const = 0;
  bool contains(const Vec& x, double tol = kGeometryTol) const { return residual(x) <= tol; }

  /// N x d ambient-orthonormal basis of T_x M.
  virtual Mat tangent_basis(const Vec& x) const = 0;
  Mat projector(const Vec& x) const;

  /// Nearest (or retraction-nearest) member point. Throws
  /// CaptureRadiusExceeded when x is further than capture_radius away.
  virtual Vec project(const Vec& x, double capture_radius = kDefaultCaptureRadius) const = 0;

  virtual std::unique_ptr<Chart> chart_at(const Vec& x) const = 0;
  /// Geodesic integration re-centres once |u| exceeds half of this.
  virtual double chart_radius() const { return 1.0; }

  /// Number of uniforms consumed by sample().
  virtual int sample_dim() const { return 0; }
  /// Maps a point of [0,1)^sample_dim() to a member point.
  virtual Vec sample(std::span<const double> u) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

/// Low-discrepancy member points (fixed seed => fixed points).
std::vector<Vec> sample_points(const Manifold& m, std::size_t count, std::uint64_t seed);

class EuclideanSpace final : public Manifold {
 public:
  /// `extent` bounds the sampling box [-extent, extent]^n only.
  explicit EuclideanSpace(int n, double extent = 1.0) : n_(n), extent_(extent) {}

  ManifoldKind kind() const override { return ManifoldKind::euclidean; }
  int ambient_dim() const override { return n_; }
  int dim() const override { return n_; }
  std::string describe() const override;
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  double chart_radius() const override { return std::numeric_limits<double>::infinity(); }
  int sample_dim() const override { return n_; }
  Vec sample(std::span<const double> u) const override;

 private:
  int n_;
  double extent_;
};

/// Unit sphere S^{n-1} in R^n (the circle for n = 2). The chart is the
/// radial retraction x + B u normalized.
class Sphere final : public Manifold {
 public:
  explicit Sphere(int ambient) : n_(ambient) {}

  ManifoldKind kind() const override { return ManifoldKind::sphere; }
  int ambient_dim() const override { return n_; }
  int dim() const override { return n_ - 1; }
  std::string describe() const override;
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  int sample_dim() const override { return n_ == 2 ? 1 : (n_ == 3 ? 2 : 2 * ((n_ + 1) / 2)); }
  Vec sample(std::span<const double> u) const override;

 private:
  int n_;
};

/// SO(n) as n x n matrices stored column-major in R^{n^2}, with the
/// Frobenius metric. Charts are X exp(sum u_a E_a / sqrt 2).
class SpecialOrthogonal final : public Manifold {
 public:
  explicit SpecialOrthogonal(int n);

  int n() const { return n_; }
  ManifoldKind kind() const override { return ManifoldKind::matrix_group; }
  int ambient_dim() const override { return n_ * n_; }
  int dim() const override { return n_ * (n_ - 1) / 2; }
  std::string describe() const override;
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  /// Polar-decomposition projection (nearest rotation in Frobenius norm).
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  int sample_dim() const override { return n_ == 2 ? 1 : 3; }
  Vec sample(std::span<const double> u) const override;

  /// Skew basis e_i e_j^T - e_j e_i^T, i < j.
  const std::vector<Mat>& lie_basis() const { return basis_; }
  static Mat to_matrix(const Vec& x, int n);
  static Vec to_vec(const Mat& m);

 private:
  int n_;
  std::vector<Mat> basis_;
};

/// Zero-dimensional manifold: a finite list of points.
class FiniteSet final : public Manifold {
 public:
  explicit FiniteSet(std::vector<Vec> points);

  const std::vector<Vec>& points() const { return points_; }
  ManifoldKind kind() const override { return ManifoldKind::finite_set; }
  int ambient_dim() const override { return static_cast<int>(points_.front().size()); }
  int dim() const override { return 0; }
  std::string describe() const override;
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  int sample_dim() const override { return 1; }
  Vec sample(std::span<const double> u) const override;

 private:
  std::vector<Vec> points_;
};

class ProductManifold final : public Manifold {
 public:
  explicit ProductManifold(std::vector<ManifoldPtr> factors);

  const std::vector<ManifoldPtr>& factors() const { return factors_; }
  int offset(std::size_t i) const { return offsets_[i]; }
  ManifoldKind kind() const override { return ManifoldKind::product; }
  int ambient_dim() const override { return ambient_; }
  int dim() const override { return dim_; }
  std::string describe() const override;
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  double chart_radius() const override;
  int sample_dim() const override;
  Vec sample(std::span<const double> u) const override;

 private:
  std::vector<ManifoldPtr> factors_;
  std::vector<int> offsets_;
  int ambient_ = 0;
  int dim_ = 0;
};

/// Level set {x in base : c(x) = 0} of a constraint that is a submersion
/// along base (redundant constraint rows are allowed). Used for fiber
/// products, nerve levels and preimage submanifolds.
class ConstrainedManifold final : public Manifold {
 public:
  using Sampler = std::function<Vec(std::span<const double>)>;

  ConstrainedManifold(ManifoldPtr base, SmoothMap constraint, int dim, std::string name,
                      ManifoldKind kind = ManifoldKind::fiber_product, Sampler sampler = {},
                      int sample_dim = 0);

  const Manifold& base() const { return *base_; }
  const SmoothMap& constraint() const { return constraint_; }
  ManifoldKind kind() const override { return kind_; }
  int ambient_dim() const override { return base_->ambient_dim(); }
  int dim() const override { return dim_; }
  std::string describe() const override { return name_; }
  double residual(const Vec& x) const override;
  Mat tangent_basis(const Vec& x) const override;
  /// Base projection followed by Gauss-Newton on the constraint.
  Vec project(const Vec& x, double capture_radius) const override;
  std::unique_ptr<Chart> chart_at(const Vec& x) const override;
  double chart_radius() const override { return base_->chart_radius(); }
  int sample_dim() const override { return sample_dim_; }
  Vec sample(std::span<const double> u) const override;

 private:
  ManifoldPtr base_;
  SmoothMap constraint_;
  int dim_;
  std::string name_;
  ManifoldKind kind_;
  Sampler sampler_;
  int sample_dim_;
};

}  // namespace lgkit
