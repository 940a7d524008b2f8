#pragma once

#include <set>
#include <vector>

#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"
#include "tllreach/tolerances.hpp"

namespace tllreach {

struct ReachPiece {
    HPolytope polytope;
    std::vector<signed char> signs;  ///< source cell sign vector
    std::vector<int> active;         ///< 0-based active function per output
};

/// Exact one-step reachable set as a union of convex pieces (one per cell of
/// the controller's pairwise-difference arrangement inside X_t).
struct ReachSet {
    std::vector<ReachPiece> pieces;

    /// True when y lies in some piece up to `tol` (normalized violation).
    bool contains(const Vector& y, double tol) const;
    Box bounding_box() const;
};

/// Cells of the pairwise-difference arrangement of `ctrl` inside `domain`,
/// with their active functions filled in. Sorted by sign vector.
struct AffineRegion {
    HPolytope region;
    Vector witness;
    std::vector<signed char> signs;
    std::vector<int> active;
};
std::vector<AffineRegion> affine_regions(const TLLController& ctrl, const HPolytope& domain,
                                         const Tolerances& tol = {});

/// Closed-loop affine map on a region: x -> (A + B W_act) x + B b_act.
struct ClosedLoopMap {
    Matrix linear;
    Vector offset;
};
ClosedLoopMap closed_loop_map(const LTISystem& sys, const TLLController& ctrl, const std::vector<int>& active);

ReachSet one_step_exact(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t,
                        const Tolerances& tol = {});

/// Exact (epsilon = 0) bounding box of the one-step reachable set: 2n LPs per cell.
Box one_step_exact_bbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t,
                        const Tolerances& tol = {});

/// Per output, the 0-based indices of the local linear functions realized on
/// some full-dimensional cell inside `domain`.
std::vector<std::set<int>> realized_functions(const TLLController& ctrl, const HPolytope& domain,
                                              const Tolerances& tol = {});

/// Every local linear function of every output is realized over `domain`.
bool is_non_degenerate(const TLLController& ctrl, const HPolytope& domain, const Tolerances& tol = {});

}  // namespace tllreach
