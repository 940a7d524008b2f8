#include "tllreach/lipschitz_grid.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tllreach/errors.hpp"
#include "tllreach/parallel.hpp"

namespace tllreach {

GridSpec make_grid_spec(const Matrix& B, double lipschitz, double extent, Eigen::Index n, double epsilon) {
    GridSpec g;
    g.epsilon = epsilon;
    g.lipschitz = lipschitz;
    g.b_norm = induced_norm_inf(B);
    const double gain = g.b_norm * lipschitz;
    if (gain <= 0.0) {
        g.single_cell = true;
        g.cube_estimate = 1.0;
        return g;
    }
    g.width = epsilon / (2.0 * gain);
    g.cube_estimate = std::pow(2.0 * extent * 2.0 * gain / epsilon, static_cast<double>(n));
    return g;
}

Box lipschitz_cell_box(const LTISystem& sys, const ControllerFn& mu, const HPolytope& P, double epsilon) {
    const auto ball = chebyshev_center(P);
    if (!ball) return Box::empty(sys.state_dim());
    const Box ax = image_bbox(P, sys.A);
    if (ax.is_empty()) return ax;
    return ax.translated(sys.B * mu(ball->center)).inflated(0.5 * epsilon);
}

Box one_step_grid_bbox(const LTISystem& sys, const ControllerFn& mu, double lipschitz, const HPolytope& X_t,
                       double epsilon, const GridOptions& options, GridStats* stats) {
    if (!(epsilon > 0.0)) throw ArgumentError("grid: epsilon must be positive");
    if (!(lipschitz >= 0.0)) throw ArgumentError("grid: Lipschitz constant must be non-negative");
    const Eigen::Index n = sys.state_dim();
    if (X_t.dim() != n) throw ArgumentError("grid: state set dimension mismatch");

    const Box domain = bbox(X_t);
    if (domain.is_empty()) throw ArgumentError("grid: state set is empty");
    const CenterExtent ce = center_extent(domain);
    const GridSpec spec = make_grid_spec(sys.B, lipschitz, ce.extent, n, epsilon);

    std::vector<long> counts(static_cast<std::size_t>(n), 1);
    double total = 1.0;
    if (!spec.single_cell) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double c = std::max(1.0, std::ceil(domain.width()(i) / spec.width));
            total *= c;
            if (total > options.max_cubes || spec.cube_estimate > options.max_cubes) {
                throw CostError("grid: about " + std::to_string(std::max(total, spec.cube_estimate)) +
                                " cubes exceeds the cap of " + std::to_string(options.max_cubes) +
                                "; use the exact-box or ltllbox method");
            }
            counts[static_cast<std::size_t>(i)] = static_cast<long>(c);
        }
    }
    const auto cube_count = static_cast<std::size_t>(total);

    std::vector<Box> boxes(cube_count);
    std::vector<char> live(cube_count, 0);
    parallel_for(cube_count, [&](std::size_t flat) {
        Box cube = domain;
        if (!spec.single_cell) {
            std::size_t rest = flat;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(counts[static_cast<std::size_t>(i)]);
                const auto idx = static_cast<double>(rest % c);
                rest /= c;
                cube.lo(i) = domain.lo(i) + idx * spec.width;
                cube.hi(i) = std::min(domain.hi(i), cube.lo(i) + spec.width);
            }
        }
        boxes[flat] = lipschitz_cell_box(sys, mu, intersect(X_t, cube), epsilon);
        live[flat] = boxes[flat].is_empty() ? 0 : 1;
    });

    Box out = Box::empty(n);
    std::size_t live_count = 0;
    for (std::size_t i = 0; i < cube_count; ++i) {
        if (!live[i]) continue;
        ++live_count;
        out.merge(boxes[i]);
    }
    if (stats) {
        stats->cubes = cube_count;
        stats->live_cubes = live_count;
    }
    return out;
}

Box one_step_grid_bbox(const LTISystem& sys, const TLLController& ctrl, const HPolytope& X_t, double epsilon,
                       const GridOptions& options, GridStats* stats) {
    sys.check_compatible(ctrl);
    return one_step_grid_bbox(
        sys, [&ctrl](const Vector& x) { return ctrl.eval(x); }, ctrl.lipschitz_bound(), X_t, epsilon, options, stats);
}

}  // namespace tllreach
