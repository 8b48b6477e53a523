#pragma once

#include "lgkit/groupoid.hpp"

#include <vector>

namespace lgkit {

/// Value together with its Jacobian against a fixed ambient input.
struct Jet {
  Vec value;
  Mat jac;
};

namespace jet {

/// Coordinates [offset, offset + size) of an input of length total.
Jet input(const Vec& x, int offset, int size);
Jet source(const LieGroupoid& g, const Jet& a);
Jet target(const LieGroupoid& g, const Jet& a);
Jet unit(const LieGroupoid& g, const Jet& x);
Jet inverse(const LieGroupoid& g, const Jet& a);
/// ab for s(a) = t(b).
Jet multiply(const LieGroupoid& g, const Jet& a, const Jet& b);
Jet concat(const std::vector<Jet>& parts);

}  // namespace jet

using Permutation = std::vector<int>;

/// All permutations of {0, ..., m-1} in lexicographic order.
std::vector<Permutation> permutations(int m);
/// (a b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& p);

/// Strings of n arrows are stored as the concatenation g_1, ..., g_n of
/// ambient arrow vectors; level 0 is the object manifold.
std::vector<Vec> split_string(const LieGroupoid& g, const Vec& x);
Vec join_string(const std::vector<Vec>& arrows);

/// G^(n) = {(g_1, ..., g_n) : s(g_i) = t(g_{i+1})}; level 1 is the arrow
/// manifold and level 0 the objects.
ManifoldPtr nerve_space(const LieGroupoid& g, int n);
/// G^[m] = m-tuples of arrows with a common source.
ManifoldPtr gauge_space(const LieGroupoid& g, int m);

/// Face i of a level-n string, 0 <= i <= n. Interior faces multiply
/// g_i g_{i+1}; epsilon_0 drops g_1 and epsilon_n drops g_n. At n = 1,
/// epsilon_0 = s and epsilon_1 = t.
Jet face_jet(const LieGroupoid& g, int n, int i, const Vec& x);
Vec face_map(const LieGroupoid& g, int n, int i, const Vec& x);
SmoothMap face_smooth(const LieGroupoid& g, int n, int i);

/// delta_i, 1 <= i <= n: inserts the unit at the object between g_i and
/// g_{i+1}, giving (g_1, ..., g_i, 1_{s(g_i)}, g_{i+1}, ..., g_n).
Jet degeneracy_jet(const LieGroupoid& g, int n, int i, const Vec& x);
Vec degeneracy_map(const LieGroupoid& g, int n, int i, const Vec& x);

/// (h_0, ..., h_n) with h_i = g_{i+1} ... g_n and h_n = 1_{s(g_n)}.
Jet canonical_lift_jet(const LieGroupoid& g, int n, const Vec& x);
Vec canonical_lift(const LieGroupoid& g, int n, const Vec& x);

/// pi(h_0, ..., h_n) = (h_0 h_1^{-1}, ..., h_{n-1} h_n^{-1}).
/// Throws NotCommonSource unless all h_i share a source.
Jet gauge_projection_jet(const LieGroupoid& g, int n, const Vec& h);
Vec gauge_projection(const LieGroupoid& g, int n, const Vec& h);
SmoothMap gauge_smooth(const LieGroupoid& g, int n);

/// sigma moves entry i of a tuple to position sigma(i).
Vec permute_tuple(const LieGroupoid& g, const Permutation& sigma, const Vec& h);
/// (h_0 k, ..., h_n k) for an arrow k with t(k) equal to the common source.
Vec right_translate(const LieGroupoid& g, const Vec& h, const Vec& k);

/// S_{n+1} action on G^(n): lift, permute, project. n = 1, 2 use the
/// closed forms (the transposition acts by inversion; at n = 2 the
/// reversal is (g_2^{-1}, g_1^{-1}) and the 3-cycle (1 2 0) gives
/// ((g_1 g_2)^{-1}, g_1)). It is a left action.
Jet sym_action_jet(const LieGroupoid& g, const Permutation& sigma, const Vec& x);
Vec sym_action(const LieGroupoid& g, const Permutation& sigma, const Vec& x);
SmoothMap sym_smooth(const LieGroupoid& g, const Permutation& sigma);
/// Same action computed through the lift for any n.
Vec sym_action_lifted(const LieGroupoid& g, const Permutation& sigma, const Vec& x);

/// Sampled strings as flat level-n vectors.
std::vector<Vec> sample_nerve(const LieGroupoid& g, int n, std::size_t count, std::uint64_t seed);

/// Residuals of the simplicial identities, the S_{n+1} action laws and the
/// gauge projection invariances on sampled strings (n <= 2 for the action).
Report check_simplicial(const LieGroupoid& g, int max_level, std::size_t n_samples, double tol,
                        std::uint64_t seed = 1, Exec exec = Exec::parallel);

}  // namespace lgkit
