#include "lgkit/algebroid.hpp"

#include "lgkit/linalg.hpp"
#include "lgkit/sampling.hpp"

#include <cmath>

namespace lgkit {

nlohmann::json AlgebroidFiber::to_json() const {
  auto rows = [](const Mat& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::vector<double> r(m.cols());
      for (Eigen::Index j = 0; j < m.cols(); ++j) r[j] = m(i, j);
      out.push_back(r);
    }
    return out;
  };
  return {{"x", std::vector<double>(x.data(), x.data() + x.size())},
          {"rank", rank()},
          {"anchor", rows(anchor)}};
}

AlgebroidFiber algebroid_at(const LieGroupoid& g, const Vec& x) {
  AlgebroidFiber a;
  a.x = x;
  a.unit = g.u(x);
  const Mat b = g.arrows->tangent_basis(a.unit);
  const Mat ds = g.source.differential(*g.arrows, a.unit);
  const Mat k = linalg::null_space(ds);
  const int expected = g.arrows->dim() - g.objects->dim();
  if (k.cols() != expected) {
    throw Error(ErrorCode::RankDeficient, "ker ds has dimension " + std::to_string(k.cols()) +
                                              ", expected " + std::to_string(expected));
  }
  a.basis = b * k;
  a.anchor = g.target.differential(*g.arrows, a.unit) * k;
  return a;
}

Report algebroid_fiber_check(const LieGroupoid& g, std::size_t samples, double tol,
                             std::uint64_t seed) {
  const auto pts = sample_points(*g.objects, samples, seed);
  std::vector<double> defects;
  defects.reserve(pts.size());
  for (const auto& x : pts) {
    try {
      const auto a = algebroid_at(g, x);
      // Ambient ds applied to ambient basis vectors.
      const Mat ds = g.source.jacobian(a.unit);
      defects.push_back(a.rank() == 0 ? 0.0 : (ds * a.basis).cwiseAbs().maxCoeff());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      defects.push_back(1.0);
    }
  }
  return Report::from_defects("algebroid_fiber", std::move(defects), tol);
}

ActionAlgebroidSection ActionAlgebroidSection::constant(Vec c, std::string name) {
  return {std::move(name), [c](const Vec&) { return c; }};
}

ActionAlgebroidSection ActionAlgebroidSection::scaled(std::function<double(const Vec&)> f) const {
  return {"f*" + name, [c = coeffs, f](const Vec& x) { return Vec(f(x) * c(x)); }};
}

namespace {

Mat algebra_element(const GroupAction& k, const Vec& c) {
  Mat m = Mat::Zero(k.n, k.n);
  for (std::size_t a = 0; a < k.lie_basis.size(); ++a) m += c(static_cast<Eigen::Index>(a)) * k.lie_basis[a];
  return m;
}

const GroupAction& require_action(const LieGroupoid& g) {
  if (!g.action || g.action->lie_basis.empty()) {
    throw Error(ErrorCode::InvalidParams, "bracket needs an action groupoid of a Lie group");
  }
  return *g.action;
}

Vec directional(const std::function<Vec(const Vec&)>& f, const Vec& x, const Vec& dir, double h) {
  return (f(x + h * dir) - f(x - h * dir)) / (2 * h);
}

}  // namespace

Vec anchor_of(const GroupAction& k, const ActionAlgebroidSection& a, const Vec& x) {
  return algebra_element(k, a(x)) * x;
}

VectorField anchor_field(std::shared_ptr<const GroupAction> k, ActionAlgebroidSection a) {
  return [k, a](const Vec& x) { return anchor_of(*k, a, x); };
}

Vec algebra_bracket(const GroupAction& k, const Vec& a, const Vec& b) {
  const Mat ma = algebra_element(k, a);
  const Mat mb = algebra_element(k, b);
  const Mat br = mb * ma - ma * mb;
  // Coefficients by least squares in the vectorized basis.
  Mat basis(k.n * k.n, static_cast<Eigen::Index>(k.lie_basis.size()));
  for (std::size_t i = 0; i < k.lie_basis.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) = GroupAction::vec(k.lie_basis[i]);
  return basis.colPivHouseholderQr().solve(GroupAction::vec(br));
}

Vec section_bracket(const GroupAction& k, const ActionAlgebroidSection& a,
                    const ActionAlgebroidSection& b, const Vec& x, double h) {
  const Vec ra = anchor_of(k, a, x);
  const Vec rb = anchor_of(k, b, x);
  return algebra_bracket(k, a(x), b(x)) + directional(b.coeffs, x, ra, h) -
         directional(a.coeffs, x, rb, h);
}

std::vector<Vec> sample_ball(int dim, std::size_t count, double radius, std::uint64_t seed) {
  // Rejection from the cube; deterministic for a fixed seed.
  LowDiscrepancy seq(dim, seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; out.size() < count; ++i) {
    const auto u = seq.point(i);
    Vec x(dim);
    for (int d = 0; d < dim; ++d) x(d) = radius * (2 * u[d] - 1);
    if (x.norm() <= radius) out.push_back(x);
  }
  return out;
}

Report leibniz_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                     const ActionAlgebroidSection& b, const ScalarField& f,
                     const std::vector<Vec>& points, double tol, Exec exec) {
  const GroupAction& k = require_action(g);
  const auto fb = b.scaled(f);
  auto defects = sample_map(
      points.size(),
      [&](std::size_t i) {
        const Vec& x = points[i];
        const Vec ra = anchor_of(k, a, x);
        const double raf = (f(x + kFdStep * ra) - f(x - kFdStep * ra)) / (2 * kFdStep);
        const Vec r = section_bracket(k, a, fb, x) - f(x) * section_bracket(k, a, b, x) - raf * b(x);
        return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
      },
      exec);
  auto rep = Report::from_defects("leibniz", std::move(defects), tol);
  rep.details["sections"] = {a.name, b.name};
  return rep;
}

Report leibniz_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                     const ActionAlgebroidSection& b, const ScalarField& f, std::size_t samples,
                     double tol, std::uint64_t seed, Exec exec) {
  return leibniz_check(g, a, b, f, sample_ball(g.objects->ambient_dim(), samples, 1.0, seed), tol,
                       exec);
}

Report antisymmetry_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                          const ActionAlgebroidSection& b, const std::vector<Vec>& points,
                          double tol) {
  const GroupAction& k = require_action(g);
  std::vector<double> defects;
  for (const auto& x : points) {
    const Vec r = section_bracket(k, a, b, x) + section_bracket(k, b, a, x);
    defects.push_back(r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff());
  }
  return Report::from_defects("antisymmetry", std::move(defects), tol);
}

Report anchor_compatibility_check(const LieGroupoid& g, const ActionAlgebroidSection& a,
                                  const ActionAlgebroidSection& b, const std::vector<Vec>& points,
                                  double tol) {
  const GroupAction& k = require_action(g);
  const VectorField xa = anchor_field(g.action, a);
  const VectorField xb = anchor_field(g.action, b);
  const ActionAlgebroidSection ab{"[" + a.name + "," + b.name + "]",
                                  [&k, a, b](const Vec& x) { return section_bracket(k, a, b, x); }};
  std::vector<double> defects;
  for (const auto& x : points) {
    // Coarser outer step: the inner bracket is itself a difference quotient.
    const Vec r = anchor_of(k, ab, x) - lie_bracket(xa, xb, x, 1e-4);
    defects.push_back(r.cwiseAbs().maxCoeff());
  }
  return Report::from_defects("anchor_compatibility", std::move(defects), tol);
}

}  // namespace lgkit
