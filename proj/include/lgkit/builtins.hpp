#pragma once

#include "lgkit/groupoid.hpp"

namespace lgkit::builtins {

/// Unit groupoid of the real line.
LieGroupoid unit_line();
/// Pair groupoid of R (arrow (a, b) runs from a to b).
LieGroupoid pair_line();
/// Pair groupoid of the unit circle (proper: compact objects).
LieGroupoid pair_circle();
/// Submersion groupoid of pr: R^2 -> R, (x, y) -> x.
LieGroupoid plane_projection();
/// Submersion groupoid of the proper map S^1 x R -> R, (theta, r) -> r,
/// with S^1 x R embedded in R^3 as (cos, sin, r).
LieGroupoid cylinder_projection();
/// Z/2 acting on R by x -> -x.
LieGroupoid z2_line();
/// Unit groupoid of R as the action of the trivial group {1}.
LieGroupoid trivial_line();
/// SO(2) acting on R^2 by rotation, with an `order`-node trapezoid rule.
LieGroupoid so2_plane(int order = 64);
/// SO(3) acting on R^3 by rotation.
LieGroupoid so3_space(int order = 8);

/// S = {0} inside R^n.
SaturatedSubmanifold origin(int n);
/// The unit circle inside R^2.
SaturatedSubmanifold unit_circle();
/// The fiber {r = r0} of the cylinder S^1 x R.
SaturatedSubmanifold cylinder_fiber(double r0);
/// The fiber {x = x0} of pr: R^2 -> R.
SaturatedSubmanifold plane_fiber(double x0);

}  // namespace lgkit::builtins
