#pragma once

#include <functional>
#include <vector>

#include "tllreach/linalg.hpp"
#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"
#include "tllreach/tolerances.hpp"

namespace tllreach {

/// {x : w . x = b}; the '+' side is w . x > b.
struct Hyperplane {
    Vector w;
    double b = 0.0;
};

/// Result of merging hyperplanes that coincide after normalization
/// (||w||_inf = 1, first nonzero entry positive).
struct NormalizedArrangement {
    std::vector<Hyperplane> planes;
    /// For each input hyperplane: index into `planes`, or -1 for a zero normal.
    std::vector<int> source_to_plane;
    /// For each input hyperplane: true when normalization reversed its orientation.
    std::vector<bool> source_flipped;
    /// For zero-normal inputs: the constant sign of w . x - b (= -b).
    std::vector<int> constant_sign;
};

NormalizedArrangement normalize_hyperplanes(const std::vector<Hyperplane>& hyperplanes,
                                            const Tolerances& tol = {});

/// One full-dimensional cell of an arrangement restricted to a domain.
struct Cell {
    /// +1 / -1 per merged hyperplane (NormalizedArrangement::planes).
    std::vector<signed char> signs;
    /// Domain intersected with the half-spaces of the hyperplanes that cross it.
    HPolytope region;
    Vector witness;
    double radius = 0.0;
    /// Active local linear function per output, when filled by the caller.
    std::vector<int> active;

    /// Sign of an input hyperplane, resolved through the merge mapping.
    int source_sign(const NormalizedArrangement& arr, std::size_t source) const;
};

struct EnumerationStats {
    std::size_t cells = 0;
    std::size_t candidates = 0;  ///< sign vectors tested with a witness LP
    std::size_t crossing = 0;    ///< hyperplanes that actually cut the domain
};

/// Callback receives each cell; returning false stops the enumeration.
using CellVisitor = std::function<bool(const Cell&)>;

/// Breadth-first enumeration of every full-dimensional cell of the
/// arrangement inside `domain`, each exactly once. Neighbors are generated by
/// flipping one crossing hyperplane at a time and validated by an
/// inscribed-ball LP; candidates thinner than tol.cell are rejected.
/// The visiting order is deterministic.
EnumerationStats enumerate_cells(const NormalizedArrangement& arrangement, const HPolytope& domain,
                                 const CellVisitor& visit, const Tolerances& tol = {});

/// Convenience form: normalizes, enumerates, and collects.
std::vector<Cell> enumerate_cells(const std::vector<Hyperplane>& hyperplanes, const HPolytope& domain,
                                  const Tolerances& tol = {});

/// Active local linear function per output at a cell witness.
std::vector<int> active_function(const TLLController& ctrl, const Vector& witness);

/// Hyperplanes l_i^k = l_j^k for every output k and i < j.
std::vector<Hyperplane> pairwise_difference_hyperplanes(const TLLController& ctrl);
std::vector<Hyperplane> pairwise_difference_hyperplanes(const ScalarTLL& tll);

}  // namespace tllreach
