#pragma once

#include <cstdint>

#include "tllreach/linalg.hpp"

namespace tllreach {

enum class LpSense { Minimize, Maximize };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vector point;  // populated only when Optimal

    bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
    double optimality = 1e-10;  // reduced-cost threshold on unit-normalized rows
    double pivot = 1e-12;
    int max_iterations = 0;     // 0 selects a size-dependent default
};

/// Optimizes `objective . x` over {x : C x <= d}.
///
/// Works on the dual standard form (min d'y, C'y = c, y >= 0), whose basis is
/// only n x n, so the cost per pivot grows linearly in the number of
/// constraints. A far-away box |x_i| <= R seeds a dual-feasible basis; if the
/// optimum still leans on that box the problem is reported Unbounded.
/// Throws SolverError when the iteration limit is hit.
LpOutcome solve_lp(const Vector& objective, const Matrix& C, const Vector& d,
                   LpSense sense, const LpOptions& options = {});

/// Process-wide count of solve_lp invocations (monotone, thread-safe).
std::uint64_t lp_call_count();

}  // namespace tllreach
