#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tllreach/errors.hpp"
#include "tllreach/lipschitz_grid.hpp"
#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"
#include "tllreach/tolerances.hpp"

namespace tllreach {

enum class BoxMethod { ExactBox, Grid, LTLLBox, Auto };

std::string to_string(BoxMethod method);
/// Accepts "exact-box"/"exact_box", "grid", "ltllbox", "auto".
BoxMethod parse_box_method(const std::string& name);

struct LTLLBoxStats {
    std::uint64_t nodes = 0;           ///< recursion nodes with a feasible region
    std::uint64_t pruned = 0;          ///< cubes missing X_t
    std::uint64_t accepted = 0;        ///< accepted by the output-box width test
    std::uint64_t forced = 0;          ///< accepted by the Lipschitz fallback at max depth
    int max_depth = 0;                 ///< deepest level reached
    int depth_limit = 0;               ///< K_max
    std::vector<std::uint64_t> per_depth;  ///< live nodes per level

    void absorb(const LTLLBoxStats& other);
};

struct LTLLBoxOptions {
    Tolerances tolerances;
};

/// Adaptive epsilon-bounding box: recursively halves a hypercube around X_t
/// until the TLL's output box over each piece, pushed through B, is narrower
/// than epsilon in every coordinate. Pieces at depth K_max are accepted with
/// the Lipschitz update instead.
Box one_step_ltllbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                     const LTLLBoxOptions& options = {}, LTLLBoxStats* stats = nullptr);

/// ceil(log2(2 ext(X_t) 2 ||B|| L / epsilon)), clamped at 0.
int ltllbox_depth_limit(double extent, double b_norm, double lipschitz, double epsilon);

/// Closed-form cost model used to pick a one-step method.
struct CostEstimate {
    BoxMethod method = BoxMethod::ExactBox;
    double predicted_ops = 0.0;   ///< cost of the chosen method
    double exact_ops = 0.0;
    double grid_ops = 0.0;
};

struct SelectionOptions {
    double band = 10.0;  ///< estimates within this factor of each other select ltllbox
};

/// LP(eta, nu) modeled as eta * nu^2.
double lp_cost(double constraints, double dimension);
/// m^{n+2} n^2 M N^{2n+3} LP(m N^2 + N_X, n) / n!
double exact_box_cost(Eigen::Index n, Eigen::Index m, Eigen::Index N, Eigen::Index M, Eigen::Index state_constraints);
/// (2 ext(X_t) 2 ||B|| L / epsilon)^n LP(2n, n)
double grid_cost(Eigen::Index n, double extent, double b_norm, double lipschitz, double epsilon);

CostEstimate select_method(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                           const SelectionOptions& options = {});

struct PropagationOptions {
    LTLLBoxOptions ltllbox;
    GridOptions grid;
    SelectionOptions selection;
};

struct PropagationStats {
    LTLLBoxStats ltllbox;
    std::uint64_t lp_calls = 0;
    std::uint64_t grid_cubes = 0;
};

struct PropagationResult {
    std::vector<Box> boxes;                 ///< B_1 .. B_T
    std::vector<BoxMethod> methods;         ///< method used per step
    std::vector<CostEstimate> estimates;    ///< filled for auto-selected steps
    PropagationStats stats;
};

/// Raised when a propagation step fails; carries the boxes computed so far.
class PropagationError : public Error {
public:
    PropagationError(const std::string& what, PropagationResult partial, bool cost_guard)
        : Error(what), partial_(std::move(partial)), cost_guard_(cost_guard) {}
    const PropagationResult& partial() const { return partial_; }
    bool cost_guard() const { return cost_guard_; }

private:
    PropagationResult partial_;
    bool cost_guard_;
};

/// One-step box with the given (non-auto) method.
Box one_step_box(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                 BoxMethod method, const PropagationOptions& options = {}, PropagationStats* stats = nullptr);

/// B_0 = X_0; B_t = one-step epsilon-box from the H-form of B_{t-1}.
PropagationResult propagate(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_0, double epsilon,
                            int steps, BoxMethod method, const PropagationOptions& options = {});

}  // namespace tllreach
