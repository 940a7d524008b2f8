#include "tllreach/arrangement.hpp"

#include <cmath>
#include <deque>
#include <string>
#include <unordered_set>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

struct WitnessResult {
    bool valid = false;
    Vector witness;
    double radius = 0.0;
};

// Unit-normal copies of the crossing hyperplanes, ready for LP assembly.
class CellProblem {
public:
    CellProblem(const NormalizedArrangement& arr, const std::vector<int>& crossing, const HPolytope& domain)
        : domain_(domain) {
        const Eigen::Index n = domain.dim();
        const auto k = static_cast<Eigen::Index>(crossing.size());
        units_.resize(k, n);
        offsets_.resize(k);
        for (Eigen::Index r = 0; r < k; ++r) {
            const Hyperplane& h = arr.planes[static_cast<std::size_t>(crossing[static_cast<std::size_t>(r)])];
            const double nrm = h.w.norm();
            units_.row(r) = h.w.transpose() / nrm;
            offsets_(r) = h.b / nrm;
        }
        const Eigen::Index rows = domain.num_constraints() + k;
        lp_C_.resize(rows, n + 1);
        lp_d_.resize(rows);
        for (Eigen::Index j = 0; j < domain.num_constraints(); ++j) {
            lp_C_.row(j).head(n) = domain.C.row(j);
            lp_C_(j, n) = domain.C.row(j).norm();
            lp_d_(j) = domain.d(j);
        }
        objective_ = Vector::Zero(n + 1);
        objective_(n) = 1.0;
    }

    // signs over crossing hyperplanes only
    WitnessResult witness(const std::string& signs, const Tolerances& tol) {
        const Eigen::Index n = domain_.dim();
        const Eigen::Index base = domain_.num_constraints();
        for (Eigen::Index r = 0; r < units_.rows(); ++r) {
            const double s = signs[static_cast<std::size_t>(r)] == '+' ? 1.0 : -1.0;
            lp_C_.row(base + r).head(n) = -s * units_.row(r);
            lp_C_(base + r, n) = 1.0;
            lp_d_(base + r) = -s * offsets_(r);
        }
        const LpOutcome out = solve_lp(objective_, lp_C_, lp_d_, LpSense::Maximize);
        WitnessResult res;
        if (out.status == LpStatus::Unbounded) throw ArgumentError("enumerate_cells: domain is unbounded");
        if (!out.optimal() || out.value < tol.cell) return res;
        res.valid = true;
        res.witness = out.point.head(n);
        res.radius = out.value;
        return res;
    }

    HPolytope region(const std::string& signs) const {
        const Eigen::Index n = domain_.dim();
        const Eigen::Index base = domain_.num_constraints();
        Matrix C(base + units_.rows(), n);
        Vector d(base + units_.rows());
        C.topRows(base) = domain_.C;
        d.head(base) = domain_.d;
        for (Eigen::Index r = 0; r < units_.rows(); ++r) {
            const double s = signs[static_cast<std::size_t>(r)] == '+' ? 1.0 : -1.0;
            C.row(base + r) = -s * units_.row(r);
            d(base + r) = -s * offsets_(r);
        }
        return HPolytope(std::move(C), std::move(d));
    }

    Eigen::Index size() const { return units_.rows(); }
    double side(Eigen::Index r, const Vector& x) const { return units_.row(r).dot(x) - offsets_(r); }

private:
    const HPolytope& domain_;
    Matrix units_;
    Vector offsets_;
    Matrix lp_C_;
    Vector lp_d_;
    Vector objective_;
};

}  // namespace

NormalizedArrangement normalize_hyperplanes(const std::vector<Hyperplane>& hyperplanes, const Tolerances& tol) {
    NormalizedArrangement arr;
    arr.source_to_plane.assign(hyperplanes.size(), -1);
    arr.source_flipped.assign(hyperplanes.size(), false);
    arr.constant_sign.assign(hyperplanes.size(), 0);
    for (std::size_t s = 0; s < hyperplanes.size(); ++s) {
        const Hyperplane& h = hyperplanes[s];
        const double m = norm_inf(h.w);
        if (m < 1e-14) {
            arr.constant_sign[s] = -h.b >= 0.0 ? 1 : -1;
            continue;
        }
        Eigen::Index lead = 0;
        while (std::abs(h.w(lead)) < 1e-14 * m) ++lead;
        const double scale = (h.w(lead) > 0.0 ? 1.0 : -1.0) / m;
        Hyperplane norm{h.w * scale, h.b * scale};
        arr.source_flipped[s] = scale < 0.0;

        int found = -1;
        for (std::size_t p = 0; p < arr.planes.size(); ++p) {
            const Hyperplane& q = arr.planes[p];
            if (norm_inf(q.w - norm.w) <= tol.dedup && std::abs(q.b - norm.b) <= tol.dedup) {
                found = static_cast<int>(p);
                break;
            }
        }
        if (found < 0) {
            found = static_cast<int>(arr.planes.size());
            arr.planes.push_back(std::move(norm));
        }
        arr.source_to_plane[s] = found;
    }
    return arr;
}

int Cell::source_sign(const NormalizedArrangement& arr, std::size_t source) const {
    const int p = arr.source_to_plane.at(source);
    if (p < 0) return arr.constant_sign[source];
    const int s = signs.at(static_cast<std::size_t>(p));
    return arr.source_flipped[source] ? -s : s;
}

EnumerationStats enumerate_cells(const NormalizedArrangement& arr, const HPolytope& domain,
                                 const CellVisitor& visit, const Tolerances& tol) {
    EnumerationStats stats;
    const auto ball = chebyshev_center(domain, tol);
    if (!ball || ball->radius < tol.cell) return stats;

    // Classify hyperplanes: constant sign over the domain or crossing it.
    std::vector<signed char> base_signs(arr.planes.size(), 1);
    std::vector<int> crossing;
    const Box dom_box = bbox(domain);
    for (std::size_t p = 0; p < arr.planes.size(); ++p) {
        const Hyperplane& h = arr.planes[p];
        double lo = 0.0, hi = 0.0;
        for (Eigen::Index i = 0; i < h.w.size(); ++i) {
            lo += std::min(h.w(i) * dom_box.lo(i), h.w(i) * dom_box.hi(i));
            hi += std::max(h.w(i) * dom_box.lo(i), h.w(i) * dom_box.hi(i));
        }
        if (lo - h.b >= -tol.cell) {
            base_signs[p] = 1;
            continue;
        }
        if (hi - h.b <= tol.cell) {
            base_signs[p] = -1;
            continue;
        }
        const LpOutcome mx = solve_lp(h.w, domain, LpSense::Maximize);
        const LpOutcome mn = solve_lp(h.w, domain, LpSense::Minimize);
        if (!mx.optimal() || !mn.optimal()) throw SolverError("enumerate_cells: domain LP failed");
        if (mx.value - h.b <= tol.cell) {
            base_signs[p] = -1;
        } else if (mn.value - h.b >= -tol.cell) {
            base_signs[p] = 1;
        } else {
            crossing.push_back(static_cast<int>(p));
        }
    }
    stats.crossing = crossing.size();

    CellProblem problem(arr, crossing, domain);
    const auto k = static_cast<std::size_t>(problem.size());

    // Seed: signs at the domain's center; greedy repair when it sits on a plane.
    std::string seed(k, '+');
    for (std::size_t r = 0; r < k; ++r) {
        seed[r] = problem.side(static_cast<Eigen::Index>(r), ball->center) >= 0.0 ? '+' : '-';
    }
    ++stats.candidates;
    WitnessResult first = problem.witness(seed, tol);
    if (!first.valid) {
        // Fix signs one plane at a time; one side of a plane through a
        // full-dimensional region is always full-dimensional.
        std::string partial;
        for (std::size_t r = 0; r < k; ++r) {
            bool chosen = false;
            for (const char s : {'+', '-'}) {
                std::string trial = partial + s;
                std::vector<int> sub_cross(crossing.begin(), crossing.begin() + static_cast<long>(r + 1));
                CellProblem prefix(arr, sub_cross, domain);
                ++stats.candidates;
                if (prefix.witness(trial, tol).valid) {
                    partial = trial;
                    chosen = true;
                    break;
                }
            }
            if (!chosen) throw SolverError("enumerate_cells: could not seed a full-dimensional cell");
        }
        seed = partial;
        ++stats.candidates;
        first = problem.witness(seed, tol);
        if (!first.valid) throw SolverError("enumerate_cells: seed cell lost full dimensionality");
    }

    auto make_cell = [&](const std::string& s, WitnessResult&& w) {
        Cell cell;
        cell.signs = base_signs;
        for (std::size_t r = 0; r < k; ++r) {
            cell.signs[static_cast<std::size_t>(crossing[r])] = s[r] == '+' ? 1 : -1;
        }
        cell.region = problem.region(s);
        cell.witness = std::move(w.witness);
        cell.radius = w.radius;
        return cell;
    };

    std::unordered_set<std::string> visited;
    std::deque<std::string> frontier;
    visited.insert(seed);
    frontier.push_back(seed);
    ++stats.cells;
    if (!visit(make_cell(seed, std::move(first)))) return stats;

    while (!frontier.empty()) {
        const std::string current = std::move(frontier.front());
        frontier.pop_front();
        for (std::size_t r = 0; r < k; ++r) {
            std::string next = current;
            next[r] = next[r] == '+' ? '-' : '+';
            if (!visited.insert(next).second) continue;
            ++stats.candidates;
            WitnessResult w = problem.witness(next, tol);
            if (!w.valid) continue;
            ++stats.cells;
            if (!visit(make_cell(next, std::move(w)))) return stats;
            frontier.push_back(std::move(next));
        }
    }
    return stats;
}

std::vector<Cell> enumerate_cells(const std::vector<Hyperplane>& hyperplanes, const HPolytope& domain,
                                  const Tolerances& tol) {
    const NormalizedArrangement arr = normalize_hyperplanes(hyperplanes, tol);
    std::vector<Cell> cells;
    enumerate_cells(
        arr, domain,
        [&](const Cell& c) {
            cells.push_back(c);
            return true;
        },
        tol);
    return cells;
}

std::vector<int> active_function(const TLLController& ctrl, const Vector& witness) {
    return ctrl.active_indices(witness);
}

std::vector<Hyperplane> pairwise_difference_hyperplanes(const ScalarTLL& tll) {
    std::vector<Hyperplane> out;
    const Eigen::Index N = tll.num_functions();
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i + 1; j < N; ++j) {
            out.push_back(Hyperplane{(tll.weights().row(i) - tll.weights().row(j)).transpose(),
                                     tll.biases()(j) - tll.biases()(i)});
        }
    }
    return out;
}

std::vector<Hyperplane> pairwise_difference_hyperplanes(const TLLController& ctrl) {
    std::vector<Hyperplane> out;
    for (const auto& c : ctrl.components()) {
        auto part = pairwise_difference_hyperplanes(c);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

}  // namespace tllreach
