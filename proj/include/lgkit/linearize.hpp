#pragma once

#include "lgkit/groupoid.hpp"
#include "lgkit/metric.hpp"
#include "lgkit/nmetric.hpp"

#include <optional>

namespace lgkit {

/// nu(S): at x in S, the eta0-orthogonal complement of T_x S in T_x M.
/// The total space {(x, v)} lives in R^{2N}.
struct NormalBundle {
  SaturatedSubmanifold base;
  Metric eta0;
  ManifoldPtr total;
  int rank = 0;

  /// N x N projector onto nu_x with kernel T_x S + (T_x M)^perp.
  Mat projector(const Vec& x) const;
  /// eta0-orthonormal basis of nu_x, N x rank.
  Mat frame(const Vec& x) const;
  Vec project(const Vec& x, const Vec& w) const { return projector(x) * w; }
  /// max deviation of the frame from eta0-orthonormality and from
  /// eta0-orthogonality to T_x S.
  double frame_defect(const Vec& x) const;

  static Vec pack(const Vec& x, const Vec& v);
  Vec point_of(const Vec& xv) const { return xv.head(xv.size() / 2); }
  Vec vector_of(const Vec& xv) const { return xv.tail(xv.size() / 2); }
};

NormalBundle build_normal_bundle(const SaturatedSubmanifold& s, const Metric& eta0);

/// T_g v: lift v through d_g s (least squares over T_g G), push by d_g t,
/// project onto nu_{t(g)}. Throws LiftFailure if d_g s is not onto.
Vec normal_rep(const LieGroupoid& g, const NormalBundle& nu, const Vec& arrow, const Vec& v);
/// Matrix of T_g in the frames of nu at s(g) and t(g).
Mat normal_rep_matrix(const LieGroupoid& g, const NormalBundle& nu, const Vec& arrow);

/// Unit and functoriality defects of T over sampled composable pairs
/// (a, b) of G_S: |T_{u(s(b))} - I| and |T_{ab} - T_a T_b| (operator
/// norm). Defects are the functoriality ones; details carry both maxima.
Report normal_rep_check(const LieGroupoid& g, const LieGroupoid& restricted,
                        const NormalBundle& nu, std::size_t samples, double tol,
                        std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// G_S acting on nu(S): arrows (g, v) with v in nu_{s(g)}, s(g, v) = v,
/// t(g, v) = T_g v, (g, v)(h, w) = (gh, w).
struct LinearModel {
  LieGroupoid restricted;
  NormalBundle normal;
  LieGroupoid groupoid;
};

LinearModel linear_model(const LieGroupoid& g, SaturatedSubmanifold s, const Metric& eta0);

/// Union of the orbits meeting the radius-tube of S, as a membership test.
struct SaturatedNeighborhood {
  double radius = 0.0;
  std::function<bool(const Vec&)> contains;
  Report certificate;
};

/// Throws NotSProper unless the groupoid is declared s-proper.
SaturatedNeighborhood saturate_neighborhood(const LieGroupoid& g, const SaturatedSubmanifold& s,
                                            double radius, std::size_t samples = 40,
                                            std::uint64_t seed = 1);

struct LinearizeOptions {
  /// Replaces the metric induced on the arrows (fault injection).
  std::optional<Metric> eta1;
  GeodesicOptions geodesic;
  std::size_t probe_samples = 200;
  /// Coarser step density used by the injectivity probe only.
  int probe_steps_per_unit = 16;
  /// Images of distinct probe samples must be at least this fraction of
  /// their separation.
  double injectivity_floor = 0.1;
  int bisection_steps = 6;
  std::uint64_t seed = 1;
};

struct LinearizationResult {
  LieGroupoid groupoid;
  LinearModel model;
  Metric eta1;
  Metric eta0;
  double radius = 0.0;
  GeodesicOptions geodesic;
  /// Worst image/preimage separation ratio of the injectivity probe.
  double injectivity_ratio = 0.0;
  std::optional<SaturatedNeighborhood> saturated;

  const NormalBundle& normal() const { return model.normal; }
  /// exp0(x, v): eta0-geodesic from x in S along v in nu_x.
  Vec exp0(const Vec& x, const Vec& v) const;
  /// The eta1-normal vector at g in G_S that corresponds to (g, v).
  Vec arrow_normal(const Vec& arrow, const Vec& v) const;
  /// exp1(g, v): eta1-geodesic from g along arrow_normal(g, v).
  Vec exp1(const Vec& arrow, const Vec& v) const;

  nlohmann::json to_json() const;
};

/// Weak linearization around S by the exponential maps of the induced
/// metrics eta1 = face_0(eta2), eta0 = s(eta1). Throws RadiusTooLarge if
/// the injectivity probe fails at `radius`; the message carries the
/// bisected estimate.
LinearizationResult linearize_exp(const LieGroupoid& g, const NMetric& eta2,
                                  SaturatedSubmanifold s, double radius,
                                  const LinearizeOptions& opt = {});

/// Largest radius in (0, r_max] passing the injectivity probe after
/// `steps` bisections (0 if none does).
double injectivity_estimate(const NormalBundle& nu, const Metric& eta0, double r_max,
                            const LinearizeOptions& opt = {});

/// details: diagram, morphism, unit_inverse, injectivity_ratio; one defect
/// per sampled model arrow (worst over the checks).
Report verify_linearization(const LinearizationResult& res, std::size_t samples, double tol,
                            std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// Fraction of sampled arrows of G between points of exp0(V) that are
/// images exp1(g, v) of model arrows with |v| <= radius (Newton inversion).
Report fullness_check(const LinearizationResult& res, std::size_t samples, double tol = 1e-8,
                      std::uint64_t seed = 1);

}  // namespace lgkit
