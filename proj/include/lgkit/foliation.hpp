#pragma once

#include "lgkit/report.hpp"
#include "lgkit/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lgkit {

using VectorField = std::function<Vec(const Vec&)>;

/// [a, b] = Db a - Da b with central differences.
Vec lie_bracket(const VectorField& a, const VectorField& b, const Vec& x, double h = kFdStep);

/// Foliation of an open set of R^m given by a leafwise frame X_1..X_k and
/// a transverse frame Y_1..Y_q completing it to a basis.
struct Foliation {
  std::string name;
  int dim = 0;
  std::vector<VectorField> leaf;
  std::vector<VectorField> transverse;

  int leaf_dim() const { return static_cast<int>(leaf.size()); }
  int codim() const { return static_cast<int>(transverse.size()); }
  /// m x m matrix [X_1 .. X_k Y_1 .. Y_q] at x.
  Mat frame(const Vec& x) const;
  /// Coordinates of w in the frame at x: leafwise first, then normal.
  Vec frame_coords(const Vec& x, const Vec& w) const;
};

/// Normal components of [X_i, X_j] at the points; pass iff all < tol.
Report involutivity_check(const Foliation& f, const std::vector<Vec>& points, double tol = 1e-4);

/// Curve gamma: [0, 1] -> R^m; velocity falls back to central differences.
struct LeafPath {
  std::function<Vec(double)> point;
  std::function<Vec(double)> velocity;
  /// Interior parameters where the velocity may jump; transport integrates
  /// each smooth piece separately.
  std::vector<double> breaks;

  Vec at(double t) const { return point(t); }
  Vec tangent(double t) const;
};

/// Concatenated flow lines: segment i follows leaf field legs[i].first for
/// time legs[i].second (negative runs backwards), each leg taking an equal
/// share of [0, 1].
LeafPath flow_path(const Foliation& f, const Vec& start,
                   const std::vector<std::pair<int, double>>& legs, int substeps = 64);

/// Reparametrization t -> phi(t) of a path (phi(0) = 0, phi(1) = 1).
LeafPath reparametrize(const LeafPath& p, std::function<double(double)> phi,
                       std::function<double(double)> dphi);

struct TransportOptions {
  int steps = 200;
  /// Normal part of gamma' relative to |gamma'| allowed at sampled t.
  double leaf_tol = 1e-6;
  int tangency_samples = 33;
};

/// Parallel transport of the Bott connection: the normal coordinates c of
/// v = sum c_j Y_j solve c' = -B(t) c with B_lj the Y_l component of
/// [gamma', Y_j], integrated by RK4. Throws NotLeafwise.
Vec bott_transport(const Foliation& f, const LeafPath& path, const Vec& normal_coords,
                   const TransportOptions& opt = {});
/// Matrix of bott_transport in the transverse frames at the endpoints.
Mat transport_matrix(const Foliation& f, const LeafPath& path, const TransportOptions& opt = {});

/// Covering transformation closing a lifted loop: point(gamma(1)) must
/// equal gamma(0).
struct DeckMap {
  std::function<Vec(const Vec&)> point;
  std::function<Mat(const Vec&)> differential;
};

/// Holonomy matrix on the normal space at loop(0). Without a deck map the
/// loop must close; with one, the transported vector is carried back by it.
/// Throws InvalidParams if the loop does not close within 1e-8.
Mat linear_holonomy(const Foliation& f, const LeafPath& loop,
                    const std::optional<DeckMap>& deck = std::nullopt,
                    const TransportOptions& opt = {});

/// max |H - I| for the transport around the flow rectangle with legs
/// X_i, X_j, -X_i, -X_j of length `side` from x.
double rectangle_defect(const Foliation& f, const Vec& x, int i, int j, double side,
                        const TransportOptions& opt = {});

namespace foliations {

/// Horizontal lines y = const in R^2.
Foliation horizontal_lines();
/// Cover of the suspension of v -> -v: leaves of X = d_theta + sin(theta) y d_y
/// in (theta, y); the deck map is (theta, y) -> (theta - 2 pi, -y).
Foliation mobius_cover();
DeckMap mobius_deck(int circuits = 1);
/// Leaf of the Mobius cover through (theta0, y0) run for `circuits` turns.
LeafPath mobius_loop(double theta0, double y0, int circuits = 1);
/// Non-involutive plane field X_1 = d_x + z y d_z, X_2 = d_y in R^3.
Foliation twisted_planes();

}  // namespace foliations

}  // namespace lgkit
