#pragma once

#include "lgkit/foliation.hpp"
#include "lgkit/groupoid.hpp"

namespace lgkit {

/// A_x = ker d s at u(x) with anchor d t restricted to it.
struct AlgebroidFiber {
  Vec x;
  Vec unit;
  /// Ambient basis of ker ds inside T_{u(x)} G, N_arrows x r (orthonormal).
  Mat basis;
  /// d t applied to the basis, N_objects x r.
  Mat anchor;

  int rank() const { return static_cast<int>(basis.cols()); }
  nlohmann::json to_json() const;
};

/// Throws RankDeficient unless dim A_x = dim G - dim M.
AlgebroidFiber algebroid_at(const LieGroupoid& g, const Vec& x);

/// Per sampled object: max |ds basis|, dimension mismatch (1 if wrong).
Report algebroid_fiber_check(const LieGroupoid& g, std::size_t samples, double tol = 1e-8,
                             std::uint64_t seed = 1);

/// Section M -> Lie algebra of K, as coefficients in the action's lie_basis.
struct ActionAlgebroidSection {
  std::string name;
  std::function<Vec(const Vec&)> coeffs;

  Vec operator()(const Vec& x) const { return coeffs(x); }
  static ActionAlgebroidSection constant(Vec c, std::string name = "const");
  /// f * s.
  ActionAlgebroidSection scaled(std::function<double(const Vec&)> f) const;
};

using ScalarField = std::function<double(const Vec&)>;

/// Sum_a c_a(x) xi_a x.
Vec anchor_of(const GroupAction& k, const ActionAlgebroidSection& a, const Vec& x);
VectorField anchor_field(std::shared_ptr<const GroupAction> k, ActionAlgebroidSection a);

/// [xi, eta]_A = eta xi - xi eta in coefficients, the sign that makes the
/// anchor a bracket homomorphism for [X, Y] = DY X - DX Y.
Vec algebra_bracket(const GroupAction& k, const Vec& a, const Vec& b);

/// [a, b](x) = [a(x), b(x)]_A + D b(x) rho(a)(x) - D a(x) rho(b)(x).
Vec section_bracket(const GroupAction& k, const ActionAlgebroidSection& a,
                    const ActionAlgebroidSection& b, const Vec& x, double h = kFdStep);

/// Points of the closed radius-ball in R^dim, low-discrepancy.
std::vector<Vec> sample_ball(int dim, std::size_t count, double radius, std::uint64_t seed = 1);

/// Residual of [a, f b] - f [a, b] - (rho(a) f) b. Requires an action
/// groupoid (InvalidParams otherwise).
Report leibniz_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                     const ActionAlgebroidSection& b, const ScalarField& f,
                     const std::vector<Vec>& points, double tol = 1e-4, Exec exec = Exec::parallel);
Report leibniz_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                     const ActionAlgebroidSection& b, const ScalarField& f, std::size_t samples,
                     double tol = 1e-4, std::uint64_t seed = 1, Exec exec = Exec::parallel);

/// |[a, b] + [b, a]| at the points.
Report antisymmetry_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                          const ActionAlgebroidSection& b, const std::vector<Vec>& points,
                          double tol = 1e-6);

/// |rho([a, b]) - [rho(a), rho(b)]| at the points (nested differences).
Report anchor_compatibility_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                                  const ActionAlgebroidSection& b, const std::vector<Vec>& points,
                                  double tol = 1e-3);

}  // namespace lgkit
