#include "tllreach/ltllbox.hpp"

#include <algorithm>
#include <cmath>

#include "tllreach/errors.hpp"
#include "tllreach/exact_reach.hpp"
#include "tllreach/lp.hpp"
#include "tllreach/parallel.hpp"
#include "tllreach/tll_verifier.hpp"

namespace tllreach {

namespace {

struct Node {
    Box cube;
    int depth = 0;
};

enum class Outcome { Pruned, Accepted, Forced, Split };

struct NodeResult {
    Outcome outcome = Outcome::Pruned;
    Box box;
};

double factorial(Eigen::Index n) {
    double f = 1.0;
    for (Eigen::Index i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

std::vector<Box> subdivide(const Box& cube) {
    const Eigen::Index n = cube.dim();
    const Vector mid = cube.center();
    std::vector<Box> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t p = 0; p < (std::size_t{1} << n); ++p) {
        Box child = cube;
        for (Eigen::Index i = 0; i < n; ++i) {
            if ((p >> i) & 1u) {
                child.lo(i) = mid(i);
            } else {
                child.hi(i) = mid(i);
            }
        }
        out.push_back(std::move(child));
    }
    return out;
}

}  // namespace

std::string to_string(BoxMethod method) {
    switch (method) {
        case BoxMethod::ExactBox: return "exact-box";
        case BoxMethod::Grid: return "grid";
        case BoxMethod::LTLLBox: return "ltllbox";
        case BoxMethod::Auto: return "auto";
    }
    return "unknown";
}

BoxMethod parse_box_method(const std::string& name) {
    if (name == "exact-box" || name == "exact_box") return BoxMethod::ExactBox;
    if (name == "grid") return BoxMethod::Grid;
    if (name == "ltllbox") return BoxMethod::LTLLBox;
    if (name == "auto") return BoxMethod::Auto;
    throw ArgumentError("unknown box method '" + name + "'");
}

void LTLLBoxStats::absorb(const LTLLBoxStats& other) {
    nodes += other.nodes;
    pruned += other.pruned;
    accepted += other.accepted;
    forced += other.forced;
    max_depth = std::max(max_depth, other.max_depth);
    depth_limit = std::max(depth_limit, other.depth_limit);
    if (per_depth.size() < other.per_depth.size()) per_depth.resize(other.per_depth.size(), 0);
    for (std::size_t d = 0; d < other.per_depth.size(); ++d) per_depth[d] += other.per_depth[d];
}

int ltllbox_depth_limit(double extent, double b_norm, double lipschitz, double epsilon) {
    const double ratio = 2.0 * extent * 2.0 * b_norm * lipschitz / epsilon;
    if (!(ratio > 1.0)) return 0;
    return static_cast<int>(std::ceil(std::log2(ratio)));
}

Box one_step_ltllbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                     const LTLLBoxOptions& options, LTLLBoxStats* stats) {
    if (!(epsilon > 0.0)) throw ArgumentError("ltllbox: epsilon must be positive");
    sys.check_compatible(ctrl);
    const Eigen::Index n = sys.state_dim();
    if (X_t.dim() != n) throw ArgumentError("ltllbox: state set dimension mismatch");

    const Box x_box = bbox(X_t);
    if (x_box.is_empty()) throw ArgumentError("ltllbox: state set is empty");
    const CenterExtent ce = center_extent(x_box);
    const double lip = ctrl.lipschitz_bound();
    const double b_norm = induced_norm_inf(sys.B);
    const int depth_limit = ltllbox_depth_limit(ce.extent, b_norm, lip, epsilon);
    const ControllerFn mu = [&ctrl](const Vector& x) { return ctrl.eval(x); };

    LTLLBoxStats local;
    local.depth_limit = depth_limit;

    auto evaluate = [&](const Node& node) -> NodeResult {
        const HPolytope region = intersect(X_t, node.cube);
        if (!is_feasible(region)) return NodeResult{Outcome::Pruned, Box()};
        if (node.depth >= depth_limit && depth_limit > 0) {
            return NodeResult{Outcome::Forced, lipschitz_cell_box(sys, mu, region, epsilon)};
        }
        const OutputBox tll_box = output_box(ctrl, region, 0.5 * epsilon, options.tolerances);
        const Box through_b = interval_matvec(sys.B, tll_box.box);
        if ((through_b.width().array() < epsilon).all()) {
            return NodeResult{Outcome::Accepted, image_bbox(region, sys.A) + through_b};
        }
        if (node.depth >= depth_limit) {
            // K_max = 0: the root cube already satisfies the Lipschitz width.
            return NodeResult{Outcome::Forced, lipschitz_cell_box(sys, mu, region, epsilon)};
        }
        return NodeResult{Outcome::Split, Box()};
    };

    Box result = Box::empty(n);
    std::vector<Node> frontier{Node{Box(ce.center.array() - ce.extent, ce.center.array() + ce.extent), 0}};
    while (!frontier.empty()) {
        const int depth = frontier.front().depth;
        std::vector<NodeResult> results(frontier.size());
        parallel_for(frontier.size(), [&](std::size_t i) {
            try {
                results[i] = evaluate(frontier[i]);
            } catch (const Error& e) {
                throw SolverError(std::string("ltllbox node at depth ") + std::to_string(depth) + ": " + e.what());
            }
        });

        std::vector<Node> next;
        std::uint64_t live = 0;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            switch (results[i].outcome) {
                case Outcome::Pruned: ++local.pruned; continue;
                case Outcome::Accepted:
                    ++local.accepted;
                    result.merge(results[i].box);
                    break;
                case Outcome::Forced:
                    ++local.forced;
                    result.merge(results[i].box);
                    break;
                case Outcome::Split:
                    for (auto& child : subdivide(frontier[i].cube)) next.push_back(Node{std::move(child), depth + 1});
                    break;
            }
            ++live;
        }
        local.nodes += live;
        local.per_depth.push_back(live);
        local.max_depth = depth;
        if (static_cast<double>(live) > std::pow(2.0, static_cast<double>(depth * n))) {
            throw SolverError("ltllbox: node count exceeded 2^(d n) at depth " + std::to_string(depth));
        }
        frontier = std::move(next);
    }
    if (stats) stats->absorb(local);
    return result;
}

double lp_cost(double constraints, double dimension) { return constraints * dimension * dimension; }

double exact_box_cost(Eigen::Index n, Eigen::Index m, Eigen::Index N, Eigen::Index M, Eigen::Index state_constraints) {
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    const double dN = static_cast<double>(N);
    return std::pow(dm, dn + 2.0) * dn * dn * static_cast<double>(M) * std::pow(dN, 2.0 * dn + 3.0) *
           lp_cost(dm * dN * dN + static_cast<double>(state_constraints), dn) / factorial(n);
}

double grid_cost(Eigen::Index n, double extent, double b_norm, double lipschitz, double epsilon) {
    const double dn = static_cast<double>(n);
    const double cubes = std::max(1.0, std::pow(2.0 * extent * 2.0 * b_norm * lipschitz / epsilon, dn));
    return cubes * lp_cost(2.0 * dn, dn);
}

CostEstimate select_method(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                           const SelectionOptions& options) {
    if (!(epsilon > 0.0)) throw ArgumentError("select_method: epsilon must be positive");
    const Eigen::Index n = sys.state_dim();
    const CenterExtent ce = center_extent(X_t);
    CostEstimate est;
    est.exact_ops = exact_box_cost(n, ctrl.output_dim(), ctrl.num_functions(), ctrl.num_groups(), X_t.num_constraints());
    est.grid_ops = grid_cost(n, ce.extent, induced_norm_inf(sys.B), ctrl.lipschitz_bound(), epsilon);
    const double lo = std::min(est.exact_ops, est.grid_ops);
    const double hi = std::max(est.exact_ops, est.grid_ops);
    est.predicted_ops = lo;
    if (hi <= options.band * lo) {
        est.method = BoxMethod::LTLLBox;
    } else {
        est.method = est.exact_ops <= est.grid_ops ? BoxMethod::ExactBox : BoxMethod::Grid;
    }
    return est;
}

Box one_step_box(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                 BoxMethod method, const PropagationOptions& options, PropagationStats* stats) {
    const std::uint64_t lp_before = lp_call_count();
    Box out;
    switch (method) {
        case BoxMethod::ExactBox:
            out = one_step_exact_bbox(sys, ctrl, X_t, options.ltllbox.tolerances);
            break;
        case BoxMethod::Grid: {
            GridStats gs;
            out = one_step_grid_bbox(sys, ctrl, X_t, epsilon, options.grid, &gs);
            if (stats) stats->grid_cubes += gs.cubes;
            break;
        }
        case BoxMethod::LTLLBox:
            out = one_step_ltllbox(sys, ctrl, X_t, epsilon, options.ltllbox, stats ? &stats->ltllbox : nullptr);
            break;
        case BoxMethod::Auto:
            throw ArgumentError("one_step_box: resolve 'auto' with select_method first");
    }
    if (stats) stats->lp_calls += lp_call_count() - lp_before;
    return out;
}

PropagationResult propagate(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_0, double epsilon,
                            int steps, BoxMethod method, const PropagationOptions& options) {
    if (steps < 1) throw ArgumentError("propagate: T must be >= 1");
    if (!(epsilon > 0.0)) throw ArgumentError("propagate: epsilon must be positive");
    sys.check_compatible(ctrl);
    PropagationResult result;
    HPolytope current = X_0;
    for (int t = 1; t <= steps; ++t) {
        try {
            BoxMethod chosen = method;
            if (method == BoxMethod::Auto) {
                const CostEstimate est = select_method(sys, ctrl, current, epsilon, options.selection);
                result.estimates.push_back(est);
                chosen = est.method;
            }
            Box next = one_step_box(sys, ctrl, current, epsilon, chosen, options, &result.stats);
            result.methods.push_back(chosen);
            result.boxes.push_back(next);
            current = next.to_polytope();
        } catch (const CostError& e) {
            throw PropagationError("step " + std::to_string(t) + ": " + e.what(), result, true);
        } catch (const Error& e) {
            throw PropagationError("step " + std::to_string(t) + ": " + e.what(), result, false);
        }
    }
    return result;
}

}  // namespace tllreach
