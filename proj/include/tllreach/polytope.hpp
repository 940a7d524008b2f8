#pragma once

#include <optional>
#include <vector>

#include "tllreach/linalg.hpp"
#include "tllreach/lp.hpp"
#include "tllreach/tolerances.hpp"

namespace tllreach {

/// H-representation {x : C x <= d}. Zero rows mean R^n (intermediate use only).
struct HPolytope {
    Matrix C;
    Vector d;

    HPolytope() = default;
    HPolytope(Matrix c, Vector rhs);

    /// The unconstrained space R^n.
    static HPolytope universe(Eigen::Index n);

    Eigen::Index dim() const { return C.cols(); }
    Eigen::Index num_constraints() const { return C.rows(); }

    /// Largest normalized violation max_j (C_j x - d_j) / ||C_j||; <= 0 inside.
    double max_violation(const Vector& x) const;
    bool contains(const Vector& x, double tol) const { return max_violation(x) <= tol; }
};

/// Axis-aligned box. The EMPTY box (lo = +inf, hi = -inf) is the merge identity.
struct Box {
    Vector lo;
    Vector hi;

    Box() = default;
    Box(Vector lower, Vector upper);

    static Box empty(Eigen::Index n);

    Eigen::Index dim() const { return lo.size(); }
    bool is_empty() const;
    Vector width() const { return hi - lo; }
    Vector center() const { return 0.5 * (lo + hi); }
    bool contains(const Vector& x, double tol) const;
    bool contains(const Box& other, double tol) const;

    /// Coordinate-wise hull with another box.
    void merge(const Box& other);
    Box inflated(double delta) const;
    Box translated(const Vector& offset) const;
    /// Product of widths; the area in the plane.
    double volume() const;

    /// 2n-row H-representation.
    HPolytope to_polytope() const;
};

/// Minkowski sum of two boxes.
Box operator+(const Box& a, const Box& b);

LpOutcome solve_lp(const Vector& objective, const HPolytope& P, LpSense sense);

bool is_feasible(const HPolytope& P);

struct Ball {
    Vector center;
    double radius = 0.0;
};

/// Center and radius of the largest inscribed Euclidean ball. Returns nullopt
/// for an empty polytope; a feasible lower-dimensional polytope yields radius 0.
/// Throws ArgumentError when P is unbounded.
std::optional<Ball> chebyshev_center(const HPolytope& P, const Tolerances& tol = {});

/// Exact bounding box via 2n LPs; EMPTY for an infeasible polytope.
Box bbox(const HPolytope& P);

/// Bounding box of {M x : x in P} via 2n LPs with objective rows of M.
Box image_bbox(const HPolytope& P, const Matrix& M);

struct CenterExtent {
    Vector center;
    Vector extents;  ///< half-width per coordinate
    double extent = 0.0;
};

CenterExtent center_extent(const Box& box);
CenterExtent center_extent(const HPolytope& P);

/// Row concatenation.
HPolytope intersect(const HPolytope& P, const HPolytope& Q);
HPolytope intersect(const HPolytope& P, const Box& box);

/// Drops zero rows and every constraint implied by the remaining ones.
/// An infeasible input collapses to the single row 0 . x <= -1.
HPolytope remove_redundant(const HPolytope& P, const Tolerances& tol = {});

/// Exact H-representation of {M x + c : x in P}. Invertible maps are handled
/// by substitution; singular ones by Fourier-Motzkin elimination, producing
/// paired inequalities for lower-dimensional images.
HPolytope affine_image(const HPolytope& P, const Matrix& M, const Vector& c,
                       const Tolerances& tol = {});

/// Eliminates the last `count` variables of P by Fourier-Motzkin, pruning
/// redundant rows after each step.
HPolytope fourier_motzkin(const HPolytope& P, Eigen::Index count, const Tolerances& tol = {});

/// Exact bounds of {B u : u in U} by sign-split interval arithmetic.
Box interval_matvec(const Matrix& B, const Box& U);

/// Grows every constraint outward by `delta` (in units of the row's 2-norm).
HPolytope inflate(const HPolytope& P, double delta);

/// Returns P unchanged when it has an inscribed ball of radius >= min_radius,
/// otherwise P inflated just enough to contain such a ball. Throws ArgumentError
/// on empty input.
HPolytope ensure_full_dimensional(const HPolytope& P, double min_radius, const Tolerances& tol = {});

}  // namespace tllreach
