#include "tllreach/tll_verifier.hpp"

#include <limits>

#include "tllreach/arrangement.hpp"
#include "tllreach/errors.hpp"

namespace tllreach {

LowerBoundResult verify_lower_bound(const ScalarTLL& tll, const HPolytope& P, double a, const Tolerances& tol) {
    if (P.dim() != tll.input_dim()) throw ArgumentError("verify_lower_bound: input set dimension mismatch");
    const HPolytope domain = ensure_full_dimensional(P, 4.0 * tol.cell, tol);

    std::vector<Hyperplane> planes;
    planes.reserve(static_cast<std::size_t>(tll.num_functions()));
    for (Eigen::Index i = 0; i < tll.num_functions(); ++i) {
        planes.push_back(Hyperplane{tll.weights().row(i).transpose(), a - tll.biases()(i)});
    }
    const NormalizedArrangement arr = normalize_hyperplanes(planes, tol);

    LowerBoundResult result;
    result.holds = true;
    enumerate_cells(
        arr, domain,
        [&](const Cell& cell) {
            ++result.cells_checked;
            for (const auto& group : tll.selectors()) {
                bool all_above = true;
                for (const int i : group) {
                    if (cell.source_sign(arr, static_cast<std::size_t>(i)) < 0) {
                        all_above = false;
                        break;
                    }
                }
                if (all_above) return true;
            }
            result.holds = false;
            result.counterexample = cell.witness;
            return false;
        },
        tol);
    return result;
}

OutputMax output_max(const ScalarTLL& tll, const HPolytope& P) {
    const Eigen::Index n = tll.input_dim();
    if (P.dim() != n) throw ArgumentError("output_max: input set dimension mismatch");
    OutputMax best{-std::numeric_limits<double>::infinity(), Vector()};
    Vector objective = Vector::Zero(n + 1);
    objective(n) = 1.0;
    for (const auto& group : tll.selectors()) {
        // maximize t  s.t.  t - w_i . x <= b_i (i in s_j),  C x <= d
        const auto g = static_cast<Eigen::Index>(group.size());
        Matrix C = Matrix::Zero(P.num_constraints() + g, n + 1);
        Vector d(P.num_constraints() + g);
        C.topLeftCorner(P.num_constraints(), n) = P.C;
        d.head(P.num_constraints()) = P.d;
        for (Eigen::Index r = 0; r < g; ++r) {
            const int i = group[static_cast<std::size_t>(r)];
            C.row(P.num_constraints() + r).head(n) = -tll.weights().row(i);
            C(P.num_constraints() + r, n) = 1.0;
            d(P.num_constraints() + r) = tll.biases()(i);
        }
        const LpOutcome out = solve_lp(objective, C, d, LpSense::Maximize);
        if (out.status == LpStatus::Infeasible) throw ArgumentError("output_max: input set is empty");
        if (out.status == LpStatus::Unbounded) throw ArgumentError("output_max: input set is unbounded");
        if (out.value > best.value) best = OutputMax{out.value, out.point.head(n)};
    }
    return best;
}

double output_min(const ScalarTLL& tll, const HPolytope& P, double tol, const Tolerances& tolerances) {
    if (!(tol > 0.0)) throw ArgumentError("output_min: tolerance must be positive");
    if (P.dim() != tll.input_dim()) throw ArgumentError("output_min: input set dimension mismatch");
    const auto ball = chebyshev_center(P, tolerances);
    if (!ball) throw ArgumentError("output_min: input set is empty");
    const CenterExtent ce = center_extent(P);

    double hi = tll.eval(ball->center);
    double lo = hi - tll.lipschitz_bound() * 2.0 * ce.extent;
    while (hi - lo > tol) {
        const double a = 0.5 * (lo + hi);
        const LowerBoundResult r = verify_lower_bound(tll, P, a, tolerances);
        if (r.holds) {
            lo = a;
        } else {
            hi = std::min(a, tll.eval(*r.counterexample));
        }
    }
    return lo;
}

OutputBox output_box(const TLLController& ctrl, const HPolytope& P, double tol, const Tolerances& tolerances) {
    const Eigen::Index m = ctrl.output_dim();
    OutputBox out{Box(Vector(m), Vector(m)), tol};
    for (Eigen::Index k = 0; k < m; ++k) {
        out.box.lo(k) = output_min(ctrl.component(k), P, tol, tolerances);
        out.box.hi(k) = output_max(ctrl.component(k), P).value;
    }
    return out;
}

}  // namespace tllreach
