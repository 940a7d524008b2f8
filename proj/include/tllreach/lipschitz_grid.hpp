#pragma once

#include <cstddef>
#include <functional>

#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"

namespace tllreach {

/// Any state-feedback law x -> u.
using ControllerFn = std::function<Vector(const Vector&)>;

/// Cube grid that makes the controller's contribution through B vary by at
/// most epsilon/2 inside each cube.
struct GridSpec {
    double epsilon = 0.0;
    double lipschitz = 0.0;
    double b_norm = 0.0;
    double width = 0.0;           ///< cube edge epsilon / (2 ||B|| L); unused when single_cell
    double cube_estimate = 0.0;   ///< (2 ext(X_t) 2 ||B|| L / epsilon)^n
    bool single_cell = false;     ///< ||B|| L == 0
};

GridSpec make_grid_spec(const Matrix& B, double lipschitz, double extent, Eigen::Index n, double epsilon);

struct GridOptions {
    double max_cubes = 1e7;
};

struct GridStats {
    std::size_t cubes = 0;        ///< cubes in the covering grid
    std::size_t live_cubes = 0;   ///< cubes that intersect X_t
};

/// Epsilon-bounding box of {A x + B mu(x) : x in X_t} by uniform gridding.
/// `lipschitz` must upper-bound mu's Lipschitz constant (max-norms).
/// Throws ArgumentError for epsilon <= 0 or lipschitz < 0, CostError when the
/// grid would exceed options.max_cubes.
Box one_step_grid_bbox(const LTISystem& sys, const ControllerFn& mu, double lipschitz, const HPolytope& X_t,
                       double epsilon, const GridOptions& options = {}, GridStats* stats = nullptr);

/// TLL convenience overload using the controller's own Lipschitz bound.
Box one_step_grid_bbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                       const GridOptions& options = {}, GridStats* stats = nullptr);

/// Box contribution of one cell P for the Lipschitz update: bbox(A P)
/// translated by B mu(c), c the Chebyshev center of P, grown by epsilon / 2.
/// Returns an EMPTY box when P is infeasible.
Box lipschitz_cell_box(const LTISystem& sys, const ControllerFn& mu, const HPolytope& P, double epsilon);

}  // namespace tllreach
