#include "tllreach/exact_reach.hpp"

#include <algorithm>
#include <cmath>

#include "tllreach/arrangement.hpp"
#include "tllreach/errors.hpp"
#include "tllreach/parallel.hpp"

namespace tllreach {

namespace {

void check_dims(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t) {
    sys.check_compatible(ctrl);
    if (X_t.dim() != sys.state_dim()) {
        throw ArgumentError("state set has dimension " + std::to_string(X_t.dim()) + ", expected " +
                            std::to_string(sys.state_dim()));
    }
}

#ifndef NDEBUG
void assert_constant_activity(const TLLController& ctrl, const AffineRegion& r, double radius) {
    const Eigen::Index n = r.witness.size();
    for (int probe = 0; probe < 3; ++probe) {
        Vector dir(n);
        for (Eigen::Index i = 0; i < n; ++i) dir(i) = std::sin(1.7 * (probe + 1) * (i + 1) + 0.3);
        if (dir.norm() == 0.0) continue;
        const Vector x = r.witness + 0.5 * radius * dir / dir.norm();
        if (ctrl.active_indices(x) != r.active) {
            throw SolverError("active function not constant on an arrangement cell");
        }
    }
}
#endif

}  // namespace

bool ReachSet::contains(const Vector& y, double tol) const {
    return std::any_of(pieces.begin(), pieces.end(),
                       [&](const ReachPiece& p) { return p.polytope.contains(y, tol); });
}

Box ReachSet::bounding_box() const {
    if (pieces.empty()) return Box();
    Box out = Box::empty(pieces.front().polytope.dim());
    for (const auto& p : pieces) out.merge(bbox(p.polytope));
    return out;
}

std::vector<AffineRegion> affine_regions(const TLLController& ctrl, const HPolytope& domain, const Tolerances& tol) {
    if (domain.dim() != ctrl.input_dim()) throw ArgumentError("affine_regions: domain dimension mismatch");
    const HPolytope full = ensure_full_dimensional(domain, 4.0 * tol.cell, tol);
    const NormalizedArrangement arr = normalize_hyperplanes(pairwise_difference_hyperplanes(ctrl), tol);
    std::vector<AffineRegion> out;
    enumerate_cells(
        arr, full,
        [&](const Cell& cell) {
            AffineRegion r{cell.region, cell.witness, cell.signs, ctrl.active_indices(cell.witness)};
#ifndef NDEBUG
            assert_constant_activity(ctrl, r, cell.radius);
#endif
            out.push_back(std::move(r));
            return true;
        },
        tol);
    std::sort(out.begin(), out.end(),
              [](const AffineRegion& a, const AffineRegion& b) { return a.signs < b.signs; });
    return out;
}

ClosedLoopMap closed_loop_map(const LTISystem& sys, const TLLController& ctrl, const std::vector<int>& active) {
    const Eigen::Index m = ctrl.output_dim();
    Matrix W(m, ctrl.input_dim());
    Vector b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto i = static_cast<Eigen::Index>(active.at(static_cast<std::size_t>(k)));
        W.row(k) = ctrl.component(k).weights().row(i);
        b(k) = ctrl.component(k).biases()(i);
    }
    return ClosedLoopMap{sys.A + sys.B * W, sys.B * b};
}

ReachSet one_step_exact(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, const Tolerances& tol) {
    check_dims(sys, ctrl, X_t);
    const auto regions = affine_regions(ctrl, X_t, tol);
    ReachSet out;
    out.pieces.resize(regions.size());
    parallel_for(regions.size(), [&](std::size_t i) {
        const AffineRegion& r = regions[i];
        const ClosedLoopMap map = closed_loop_map(sys, ctrl, r.active);
        out.pieces[i] = ReachPiece{affine_image(remove_redundant(r.region, tol), map.linear, map.offset, tol),
                                   r.signs, r.active};
    });
    return out;
}

Box one_step_exact_bbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, const Tolerances& tol) {
    check_dims(sys, ctrl, X_t);
    const auto regions = affine_regions(ctrl, X_t, tol);
    std::vector<Box> boxes(regions.size());
    parallel_for(regions.size(), [&](std::size_t i) {
        const ClosedLoopMap map = closed_loop_map(sys, ctrl, regions[i].active);
        boxes[i] = image_bbox(regions[i].region, map.linear).translated(map.offset);
    });
    Box out = Box::empty(sys.state_dim());
    for (const auto& b : boxes) out.merge(b);
    return out;
}

std::vector<std::set<int>> realized_functions(const TLLController& ctrl, const HPolytope& domain,
                                              const Tolerances& tol) {
    if (domain.dim() != ctrl.input_dim()) throw ArgumentError("realized_functions: domain dimension mismatch");
    std::vector<std::set<int>> out(static_cast<std::size_t>(ctrl.output_dim()));
    for (Eigen::Index k = 0; k < ctrl.output_dim(); ++k) {
        const ScalarTLL& tll = ctrl.component(k);
        const NormalizedArrangement arr = normalize_hyperplanes(pairwise_difference_hyperplanes(tll), tol);
        enumerate_cells(
            arr, domain,
            [&](const Cell& cell) {
                out[static_cast<std::size_t>(k)].insert(tll.active_index(cell.witness));
                return true;
            },
            tol);
    }
    return out;
}

bool is_non_degenerate(const TLLController& ctrl, const HPolytope& domain, const Tolerances& tol) {
    const auto realized = realized_functions(ctrl, domain, tol);
    return std::all_of(realized.begin(), realized.end(), [&](const std::set<int>& s) {
        return static_cast<Eigen::Index>(s.size()) == ctrl.num_functions();
    });
}

}  // namespace tllreach
