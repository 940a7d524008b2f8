#pragma once

#include <string>
#include <vector>

#include "tllreach/exact_reach.hpp"
#include "tllreach/polytope.hpp"

namespace tllreach {

/// Static SVG of a planar analysis: the initial set, one outline per reach
/// box, and optionally the exact one-step pieces. Requires n = 2.
std::string render_svg(const HPolytope& initial_set, const std::vector<Box>& boxes, const ReachSet* exact = nullptr);

/// Vertices of a bounded planar polytope in counter-clockwise order.
std::vector<Vector> polygon_vertices(const HPolytope& P, double tol = 1e-9);

}  // namespace tllreach
