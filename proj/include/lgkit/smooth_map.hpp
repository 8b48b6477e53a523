#pragma once

#include "lgkit/types.hpp"

#include <functional>
#include <utility>

namespace lgkit {

class Manifold;

/// A map between ambient spaces with an optional analytic Jacobian.
/// Without one, the Jacobian falls back to central differences.
class SmoothMap {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;

  SmoothMap() = default;
  SmoothMap(int in_dim, int out_dim, EvalFn f, JacFn jac = {})
      : in_dim_(in_dim), out_dim_(out_dim), f_(std::move(f)), jac_(std::move(jac)) {}

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  bool has_jacobian() const { return static_cast<bool>(jac_); }
  explicit operator bool() const { return static_cast<bool>(f_); }

  Vec operator()(const Vec& x) const { return f_(x); }

  /// Ambient Jacobian (out_dim x in_dim).
  Mat jacobian(const Vec& x, double h = kFdStep) const;

  /// Jacobian restricted to the tangent space of `domain` at x, expressed in
  /// the tangent basis of domain: out_dim x dim(domain). Uses the analytic
  /// Jacobian when present, otherwise differentiates along a chart so the
  /// evaluation never leaves the manifold.
  Mat differential(const Manifold& domain, const Vec& x, double h = kFdStep) const;

  SmoothMap then(const SmoothMap& g) const;

  static SmoothMap identity(int dim);
  /// Selects coordinates [offset, offset + size) of the input.
  static SmoothMap block(int in_dim, int offset, int size);
  static SmoothMap linear(const Mat& a);

 private:
  int in_dim_ = 0;
  int out_dim_ = 0;
  EvalFn f_;
  JacFn jac_;
};

}  // namespace lgkit
