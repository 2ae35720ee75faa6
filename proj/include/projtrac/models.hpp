#pragma once
#include <map>
#include <string>
#include <vector>

#include "projtrac/geometry.hpp"

namespace projtrac {

enum class Wedge { Spacelike, Timelike };

// Flat metric in coordinates (t, x1, ..., x_{n-1}).
Chart minkowski_cartesian_chart(int n);
// Affine chart of RP^n at infinity: t = 1/rho, x_i = y_i/rho. Boundary points with |y| < 1 lie over
// timelike directions (H-), |y| > 1 over spacelike directions (H+) and |y| = 1 over null ones (H0).
Chart minkowski_projective_chart(int n);
// x = phi(y)/rho with phi on the unit hyperboloid eta(phi, phi) = +1 (spacelike wedge) or
// -1 (timelike wedge). Coordinates (rho, s, th1, ..., th_{n-2}); boundary rho = 0.
Chart minkowski_wedge_chart(int n, Wedge wedge);
// Exterior Schwarzschild-Tangherlini, f = 1 - 2m/r^(n-3), in the slicing t = sinh(s)/rho,
// r = cosh(s)/rho. Reduces to the spacelike wedge at m = 0.
Chart schwarzschild_chart(int n, double mass);
// Metric components g_<a>_<b> given as expressions in the coordinates and parameters.
Chart expression_chart(const std::string& id, const std::vector<std::string>& coords, int boundary,
                       const std::map<std::string, std::string>& components,
                       const std::map<std::string, double>& params);

// Boundary metric of a wedge, in coordinates (s, th1, ...): unit de Sitter or unit hyperbolic space.
Chart wedge_boundary_chart(int n, Wedge wedge);

}  // namespace projtrac
