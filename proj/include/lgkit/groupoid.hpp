#pragma once

#include "lgkit/manifold.hpp"
#include "lgkit/parallel.hpp"
#include "lgkit/report.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lgkit {

/// Weighted nodes on a compact group; weights sum to one.
struct QuadratureRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  /// Throws QuadratureInvalid unless weights are positive and sum to 1.
  void validate() const;

  /// Equal weights over a finite group.
  static QuadratureRule finite(const std::vector<Vec>& elements);
  /// Trapezoid rule on SO(2): rotations by 2 pi j / order.
  static QuadratureRule circle(int order);
  /// ZYZ Euler-angle product rule on SO(3): Gauss-Legendre in cos(beta),
  /// trapezoid in alpha and gamma, each with `order` nodes.
  static QuadratureRule so3(int order);
};

/// Linear action of a compact matrix group K on an invariant manifold
/// M in R^n. Group elements are n x n matrices stored column-major.
struct GroupAction {
  ManifoldPtr group;
  ManifoldPtr space;
  int n = 0;
  QuadratureRule haar;
  /// Basis of the Lie algebra (empty for finite K).
  std::vector<Mat> lie_basis;
  /// Finite K is treated as discrete; SO(n) as connected.
  bool finite = false;

  Mat matrix(const Vec& k) const { return Eigen::Map<const Mat>(k.data(), n, n); }
  static Vec vec(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }
  Vec identity() const { return vec(Mat::Identity(n, n)); }
  Vec act(const Vec& k, const Vec& x) const { return matrix(k) * x; }
  Vec multiply(const Vec& a, const Vec& b) const { return vec(matrix(a) * matrix(b)); }
  Vec inverse(const Vec& k) const { return vec(matrix(k).inverse()); }

  /// max |act(e,x) - x| and |act(a, act(b, x)) - act(ab, x)| over samples.
  double law_defect(const std::vector<Vec>& points, std::uint64_t seed) const;

  static GroupAction finite_group(std::vector<Mat> elements, ManifoldPtr space);
  static GroupAction rotations(int n, ManifoldPtr space, int quadrature_order = 64);
};

enum class GroupoidKind { unit, pair, submersion, action, restricted, linear_model };

const char* to_string(GroupoidKind kind);

struct Properness {
  bool proper = false;
  bool s_proper = false;
};

/// Lie groupoid G => M realized on embedded arrow and object manifolds.
/// `multiply` takes the concatenation [g; h] of a composable pair
/// (s(g) = t(h)) and returns gh before projection onto the arrow manifold.
struct LieGroupoid {
  /// Maps (uniforms, x) to an arrow with source x.
  using FiberSampler = std::function<Vec(std::span<const double>, const Vec&)>;

  std::string name;
  GroupoidKind kind = GroupoidKind::unit;
  ManifoldPtr objects;
  ManifoldPtr arrows;
  SmoothMap source;
  SmoothMap target;
  SmoothMap unit;
  SmoothMap inverse;
  SmoothMap multiply;
  Properness flags;
  FiberSampler arrow_with_source;
  int fiber_sample_dim = 0;
  std::shared_ptr<const GroupAction> action;

  Vec s(const Vec& g) const { return source(g); }
  Vec t(const Vec& g) const { return target(g); }
  Vec u(const Vec& x) const { return unit(x); }
  Vec inv(const Vec& g) const { return inverse(g); }

  /// gh for s(g) = t(h) within kComposeTol, projected onto the arrows.
  /// Throws NotComposable otherwise.
  Vec compose(const Vec& g, const Vec& h) const;
  /// Same product without the composability check.
  Vec compose_unchecked(const Vec& g, const Vec& h) const;

  /// Uniforms consumed by sample_arrow: object sample then fiber sample.
  int arrow_sample_dim() const { return objects->sample_dim() + fiber_sample_dim; }
  Vec sample_arrow(std::span<const double> u) const;

  /// Copy with the multiplication replaced (used for fault injection).
  LieGroupoid with_multiply(SmoothMap m) const;
};

struct ArrowSample {
  Vec arrow;
  Vec src;
  Vec tgt;
};

/// Uniforms consumed by string_from_uniforms at level n.
int string_sample_dim(const LieGroupoid& g, int n);
/// g_n from an arrow sample, then g_i with source t(g_{i+1}).
std::vector<Vec> string_from_uniforms(const LieGroupoid& g, int n, std::span<const double> u);

/// Composable strings (g_1, ..., g_n), s(g_i) = t(g_{i+1}), drawn from a
/// seeded low-discrepancy sequence. Sample i depends only on (seed, i).
std::vector<std::vector<Vec>> sample_strings(const LieGroupoid& g, int n, std::size_t count,
                                             std::uint64_t seed);
std::vector<ArrowSample> sample_arrows(const LieGroupoid& g, std::size_t count,
                                       std::uint64_t seed);

struct SubmersionParams {
  ManifoldPtr total;
  ManifoldPtr base;
  SmoothMap pi;
  /// (uniforms, x) -> a point of the fiber through x.
  LieGroupoid::FiberSampler fiber_sampler;
  int fiber_sample_dim = 0;
  /// Declared: whether pi is a proper map (makes the groupoid s-proper).
  bool pi_proper = false;
};

struct PairParams {
  ManifoldPtr space;
  /// Declared: compact M makes the pair groupoid proper and s-proper.
  bool compact = false;
};

LieGroupoid build_unit_groupoid(ManifoldPtr m);
LieGroupoid build_pair_groupoid(const PairParams& params);
/// Throws RankDeficientSubmersion if d pi is not onto at sampled points.
LieGroupoid build_submersion_groupoid(const SubmersionParams& params);
/// Throws InvalidParams if the action laws fail on samples.
LieGroupoid build_action_groupoid(std::shared_ptr<const GroupAction> action);

/// Associativity on composable triples, unit and inverse laws, and full rank
/// of ds and dt. details holds the worst residual per law.
Report check_axioms(const LieGroupoid& g, std::size_t n_samples, double tol,
                    std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// t(s^{-1}(x)) sampled with up to `budget` arrows; zero-dimensional
/// source fibers are deduplicated.
std::vector<Vec> orbit_sample(const LieGroupoid& g, const Vec& x, int budget = kDefaultBudget,
                              std::uint64_t seed = 1);

/// Arrows with s(g) = t(g) = x: arrows out of x are pulled onto t = x by
/// Gauss-Newton inside the s-fiber and deduplicated.
std::vector<Vec> isotropy_sample(const LieGroupoid& g, const Vec& x, int budget = kDefaultBudget,
                                 std::uint64_t seed = 1);

/// S = phi^{-1}(0) inside M for a defining map phi that is a submersion
/// along S.
struct SaturatedSubmanifold {
  ManifoldPtr parent;
  SmoothMap defining;
  std::shared_ptr<const ConstrainedManifold> manifold;
  Report certificate;

  double distance(const Vec& x) const;
};

SaturatedSubmanifold make_submanifold(ManifoldPtr parent, SmoothMap defining, int dim,
                                      std::string name,
                                      ConstrainedManifold::Sampler sampler = {},
                                      int sample_dim = 0);

/// Orbit-escape check: orbits of sampled points of S stay in S.
Report saturation_check(const LieGroupoid& g, const SaturatedSubmanifold& s, int points = 20,
                        int budget = 64, double tol = 1e-8, std::uint64_t seed = 1);

/// G_S = s^{-1}(S). Runs saturation_check first (stored as the certificate)
/// and throws NotSaturated if an orbit escapes.
LieGroupoid restrict_to_saturated(const LieGroupoid& g, SaturatedSubmanifold& s);

nlohmann::json describe(const LieGroupoid& g);

}  // namespace lgkit
