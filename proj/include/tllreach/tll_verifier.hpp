#pragma once

#include <optional>

#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"
#include "tllreach/tolerances.hpp"

namespace tllreach {

struct LowerBoundResult {
    bool holds = false;
    std::optional<Vector> counterexample;  ///< point with NN(x) < a when !holds
    std::size_t cells_checked = 0;
};

/// Decides NN(x) >= a for all x in P without enumerating the affine regions
/// of the network: only the N hyperplanes l_i(x) = a are arranged, and a cell
/// passes when some selector group is entirely on the '+' side.
LowerBoundResult verify_lower_bound(const ScalarTLL& tll, const HPolytope& P, double a, const Tolerances& tol = {});

struct OutputMax {
    double value = 0.0;
    Vector argmax;
};

/// Exact max of NN over P: one epigraph LP per selector group.
OutputMax output_max(const ScalarTLL& tll, const HPolytope& P);

/// Lower bound lo with min_P NN in [lo, lo + tol], by bisection on
/// verify_lower_bound. Counterexample values tighten the upper bracket.
double output_min(const ScalarTLL& tll, const HPolytope& P, double tol, const Tolerances& tolerances = {});

/// Per-output [output_min, output_max]: hi exact, lo within `tol` below the
/// true minimum.
struct OutputBox {
    Box box;
    double slack = 0.0;
};
OutputBox output_box(const TLLController& ctrl, const HPolytope& P, double tol, const Tolerances& tolerances = {});

}  // namespace tllreach
