#include "tllreach/lp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

std::atomic<std::uint64_t> g_lp_calls{0};

constexpr int kBlandAfterDegenerate = 50;

}  // namespace

std::uint64_t lp_call_count() { return g_lp_calls.load(std::memory_order_relaxed); }

LpOutcome solve_lp(const Vector& objective, const Matrix& C, const Vector& d, LpSense sense,
                   const LpOptions& options) {
    g_lp_calls.fetch_add(1, std::memory_order_relaxed);

    const Eigen::Index n = C.cols();
    if (objective.size() != n || d.size() != C.rows()) {
        throw ArgumentError("solve_lp: objective/constraint dimensions disagree");
    }

    // Row normalization; zero rows are either vacuous or certify infeasibility.
    std::vector<Eigen::Index> kept;
    kept.reserve(static_cast<std::size_t>(C.rows()));
    Vector scale(C.rows());
    for (Eigen::Index j = 0; j < C.rows(); ++j) {
        const double nrm = C.row(j).norm();
        if (!std::isfinite(nrm) || !std::isfinite(d(j))) {
            throw ArgumentError("solve_lp: non-finite constraint data");
        }
        if (nrm < 1e-14) {
            if (d(j) < -options.optimality) return LpOutcome{LpStatus::Infeasible, 0.0, {}};
            continue;
        }
        scale(j) = 1.0 / nrm;
        kept.push_back(j);
    }

    if (n == 0) {
        return LpOutcome{LpStatus::Optimal, 0.0, Vector(0)};
    }

    const auto eta = static_cast<Eigen::Index>(kept.size());
    const Eigen::Index total = eta + 2 * n;
    Matrix rows(total, n);
    Vector rhs(total);
    double dmax = 1.0;
    for (Eigen::Index k = 0; k < eta; ++k) {
        const Eigen::Index j = kept[static_cast<std::size_t>(k)];
        rows.row(k) = C.row(j) * scale(j);
        rhs(k) = d(j) * scale(j);
        dmax = std::max(dmax, std::abs(rhs(k)));
    }
    const double far = 1e7 * dmax;
    for (Eigen::Index i = 0; i < n; ++i) {
        rows.row(eta + 2 * i).setZero();
        rows(eta + 2 * i, i) = 1.0;
        rows.row(eta + 2 * i + 1).setZero();
        rows(eta + 2 * i + 1, i) = -1.0;
        rhs(eta + 2 * i) = far;
        rhs(eta + 2 * i + 1) = far;
    }

    const Vector c = sense == LpSense::Maximize ? Vector(objective) : Vector(-objective);

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(n));
    std::vector<char> in_basis(static_cast<std::size_t>(total), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index row = eta + 2 * i + (c(i) >= 0.0 ? 0 : 1);
        basis[static_cast<std::size_t>(i)] = row;
        in_basis[static_cast<std::size_t>(row)] = 1;
    }

    const int max_iter = options.max_iterations > 0
                             ? options.max_iterations
                             : static_cast<int>(100 * total + 1000);
    int degenerate_streak = 0;
    bool bland = false;

    Matrix basis_rows(n, n);
    Vector basis_rhs(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (Eigen::Index i = 0; i < n; ++i) {
            basis_rows.row(i) = rows.row(basis[static_cast<std::size_t>(i)]);
            basis_rhs(i) = rhs(basis[static_cast<std::size_t>(i)]);
        }
        const Eigen::PartialPivLU<Matrix> lu(basis_rows);
        const Eigen::PartialPivLU<Matrix> lu_t(basis_rows.transpose());
        const Vector x = lu.solve(basis_rhs);
        Vector y = lu_t.solve(c);
        const Vector slack = rhs - rows * x;

        // Entering row: most violated constraint, or lowest index under Bland.
        Eigen::Index enter = -1;
        // Slack round-off grows with |x| (the far box sits at ~1e7).
        double worst = -(options.optimality + 1e-12 * x.cwiseAbs().maxCoeff());
        for (Eigen::Index j = 0; j < total; ++j) {
            if (in_basis[static_cast<std::size_t>(j)]) continue;
            if (slack(j) < worst) {
                enter = j;
                if (bland) break;
                worst = slack(j);
            }
        }

        if (enter < 0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (basis[static_cast<std::size_t>(i)] >= eta && y(i) > options.optimality) {
                    return LpOutcome{LpStatus::Unbounded, 0.0, {}};
                }
            }
            return LpOutcome{LpStatus::Optimal, objective.dot(x), x};
        }

        const Vector delta = lu_t.solve(Vector(rows.row(enter).transpose()));
        Eigen::Index leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (delta(i) <= options.pivot) continue;
            const double ratio = std::max(0.0, y(i)) / delta(i);
            if (leave < 0 || ratio < best_ratio - 1e-15) {
                leave = i;
                best_ratio = ratio;
            } else if (ratio <= best_ratio + 1e-15) {
                const bool prefer =
                    bland ? basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]
                          : delta(i) > delta(leave);
                if (prefer) {
                    leave = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
        }
        if (leave < 0) {
            // Dual ray: the primal constraints are inconsistent.
            return LpOutcome{LpStatus::Infeasible, 0.0, {}};
        }

        if (best_ratio < 1e-14) {
            if (++degenerate_streak > kBlandAfterDegenerate) bland = true;
        } else {
            degenerate_streak = 0;
        }

        in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
        basis[static_cast<std::size_t>(leave)] = enter;
        in_basis[static_cast<std::size_t>(enter)] = 1;
    }
    throw SolverError("solve_lp: iteration limit reached (" + std::to_string(max_iter) + ")");
}

}  // namespace tllreach
