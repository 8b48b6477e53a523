#pragma once

#include "lgkit/groupoid.hpp"
#include "lgkit/metric.hpp"
#include "lgkit/nerve.hpp"

#include <optional>

namespace lgkit {

enum class MetricProvenance { explicit_formula, gauge_trick, induced, user };

const char* to_string(MetricProvenance p);

/// Candidate metric on the level-n nerve G^(n).
struct NMetric {
  int level = 0;
  Metric metric;
  MetricProvenance provenance = MetricProvenance::user;
  nlohmann::json info = nlohmann::json::object();

  nlohmann::json describe() const;
};

/// Jets of the objects x_0 = t(g_1), x_i = s(g_i) of a level-n string.
std::vector<Jet> object_jets(const LieGroupoid& g, int n, const Vec& x);

struct SubmersionMetrics {
  NMetric eta0;
  NMetric eta1;
  NMetric eta2;
  Report precondition;
};

/// eta^(n) = sum_j p_j^* eta - n p_N^* eta_N for n = 0, 1, 2 on the
/// submersion groupoid of pi. Throws NotRiemannianSubmersion unless pi is a
/// Riemannian submersion (eta, eta_N) on sampled points.
SubmersionMetrics submersion_groupoid_metrics(const LieGroupoid& g, const Metric& eta,
                                              const Metric& eta_n, const SmoothMap& pi,
                                              std::size_t samples = 32, double tol = 1e-8);

/// sum_k w_k (x -> kx)^* g over the quadrature nodes.
Metric average_metric(const Metric& g, const GroupAction& action, const QuadratureRule& quad);

/// max over points and elements of the form defect between (x -> kx)^* g
/// and g.
double action_invariance_defect(const Metric& g, const GroupAction& action,
                                const std::vector<Vec>& points, const std::vector<Vec>& elements);

struct GaugeTrickOptions {
  /// Metric on the objects before averaging (Euclidean if unset).
  std::optional<Metric> eta_objects;
  std::size_t check_samples = 6;
  double check_tol = 1e-6;
};

struct GaugeTrick {
  /// K-averaged metric on the objects.
  Metric objects_metric;
  /// Bi-invariant on K plus objects_metric on the base point.
  Metric arrows_metric;
  /// Product metric on G^[3] averaged over the right action and S_3.
  Metric tuple_metric;
  NMetric eta2;
  Report pushforward_check;
};

/// Gauge-trick 2-metric of a proper action groupoid. Throws NotCompactGroup
/// without a valid quadrature rule on K, and PushforwardInconsistent if the
/// averaged metric does not make pi^(2) a Riemannian submersion.
GaugeTrick gauge_trick(const LieGroupoid& g, const GaugeTrickOptions& opt = {});
NMetric build_proper_action_2metric(const LieGroupoid& g, const GaugeTrickOptions& opt = {});

/// Canonical preimage of y in G^(n-1) under face i of G^(n): a unit is
/// inserted where the face removed an object.
Vec face_preimage(const LieGroupoid& g, int n, int face, const Vec& y);

/// Pushforward of a level-n metric along face i, taken at the canonical
/// preimage. Throws FaceNotSubmersive if sampled fibers are not
/// equidistant within tol.
NMetric induce_lower_metric(const LieGroupoid& g, const NMetric& c, int face,
                            std::size_t check_samples = 4, double tol = 1e-6,
                            std::uint64_t seed = 1);

/// Level >= 1: (a) S_{n+1} invariance, (b) submersion defect of every face
/// against its induced metric, (c) agreement of the induced metrics.
/// Level 0: the normal representations on orbit-normal spaces are
/// isometries.
Report verify_n_metric(const LieGroupoid& g, const NMetric& c, std::size_t samples, double tol,
                       std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// Matrix of the normal representation nu_{s(a)}(O) -> nu_{t(a)}(O) of the
/// orbit foliation in eta0-orthonormal frames.
Mat orbit_normal_representation(const LieGroupoid& g, const Metric& eta0, const Vec& a);

}  // namespace lgkit
