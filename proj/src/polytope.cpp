#include "tllreach/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HPolytope canonical_empty(Eigen::Index n) {
    Matrix C = Matrix::Zero(1, n);
    Vector d(1);
    d(0) = -1.0;
    return HPolytope(std::move(C), std::move(d));
}

// Scales each row to unit max-norm and drops zero rows (or returns nullopt-like
// empty marker through `infeasible`).
HPolytope normalize_rows(const HPolytope& P, double zero_tol, bool& infeasible) {
    infeasible = false;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < P.C.rows(); ++j) {
        const double m = P.C.row(j).cwiseAbs().maxCoeff();
        if (m <= zero_tol) {
            if (P.d(j) < -zero_tol) infeasible = true;
            continue;
        }
        keep.push_back(j);
    }
    Matrix C(static_cast<Eigen::Index>(keep.size()), P.dim());
    Vector d(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const double m = P.C.row(keep[k]).cwiseAbs().maxCoeff();
        C.row(row) = P.C.row(keep[k]) / m;
        d(row) = P.d(keep[k]) / m;
    }
    return HPolytope(std::move(C), std::move(d));
}

}  // namespace

HPolytope::HPolytope(Matrix c, Vector rhs) : C(std::move(c)), d(std::move(rhs)) {
    if (C.rows() != d.size()) {
        throw ArgumentError("HPolytope: C has " + std::to_string(C.rows()) + " rows but d has " +
                            std::to_string(d.size()) + " entries");
    }
}

HPolytope HPolytope::universe(Eigen::Index n) { return HPolytope(Matrix(0, n), Vector(0)); }

double HPolytope::max_violation(const Vector& x) const {
    if (x.size() != dim()) throw ArgumentError("HPolytope::max_violation: dimension mismatch");
    double worst = -kInf;
    for (Eigen::Index j = 0; j < C.rows(); ++j) {
        const double nrm = C.row(j).norm();
        const double r = C.row(j).dot(x) - d(j);
        worst = std::max(worst, nrm > 0.0 ? r / nrm : (r > 0.0 ? kInf : -kInf));
    }
    return worst;
}

Box::Box(Vector lower, Vector upper) : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw ArgumentError("Box: lo/hi dimension mismatch");
}

Box Box::empty(Eigen::Index n) { return Box(Vector::Constant(n, kInf), Vector::Constant(n, -kInf)); }

bool Box::is_empty() const {
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo(i) <= hi(i))) return true;
    }
    return false;
}

bool Box::contains(const Vector& x, double tol) const {
    if (x.size() != dim()) throw ArgumentError("Box::contains: dimension mismatch");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
    }
    return true;
}

bool Box::contains(const Box& other, double tol) const {
    if (other.is_empty()) return true;
    if (other.dim() != dim()) throw ArgumentError("Box::contains: dimension mismatch");
    return (other.lo.array() >= lo.array() - tol).all() && (other.hi.array() <= hi.array() + tol).all();
}

void Box::merge(const Box& other) {
    if (other.dim() != dim()) throw ArgumentError("Box::merge: dimension mismatch");
    lo = lo.cwiseMin(other.lo);
    hi = hi.cwiseMax(other.hi);
}

Box Box::inflated(double delta) const {
    return Box(lo.array() - delta, hi.array() + delta);
}

Box Box::translated(const Vector& offset) const { return Box(lo + offset, hi + offset); }

double Box::volume() const {
    if (is_empty()) return 0.0;
    return width().prod();
}

HPolytope Box::to_polytope() const {
    const Eigen::Index n = dim();
    Matrix C = Matrix::Zero(2 * n, n);
    Vector d(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        C(2 * i, i) = 1.0;
        d(2 * i) = hi(i);
        C(2 * i + 1, i) = -1.0;
        d(2 * i + 1) = -lo(i);
    }
    return HPolytope(std::move(C), std::move(d));
}

Box operator+(const Box& a, const Box& b) {
    if (a.dim() != b.dim()) throw ArgumentError("Box sum: dimension mismatch");
    return Box(a.lo + b.lo, a.hi + b.hi);
}

LpOutcome solve_lp(const Vector& objective, const HPolytope& P, LpSense sense) {
    return solve_lp(objective, P.C, P.d, sense);
}

bool is_feasible(const HPolytope& P) {
    return solve_lp(Vector::Zero(P.dim()), P, LpSense::Maximize).status != LpStatus::Infeasible;
}

std::optional<Ball> chebyshev_center(const HPolytope& P, const Tolerances& tol) {
    const Eigen::Index n = P.dim();
    const Eigen::Index rows = P.num_constraints();
    Matrix C(rows, n + 1);
    C.leftCols(n) = P.C;
    for (Eigen::Index j = 0; j < rows; ++j) C(j, n) = P.C.row(j).norm();
    Vector objective = Vector::Zero(n + 1);
    objective(n) = 1.0;
    const LpOutcome out = solve_lp(objective, C, P.d, LpSense::Maximize);
    if (out.status == LpStatus::Infeasible) return std::nullopt;
    if (out.status == LpStatus::Unbounded) {
        throw ArgumentError("chebyshev_center: polytope is unbounded");
    }
    if (out.value < -tol.feasibility) return std::nullopt;
    Ball ball;
    ball.center = out.point.head(n);
    ball.radius = std::max(0.0, out.value);
    return ball;
}

Box image_bbox(const HPolytope& P, const Matrix& M) {
    if (M.cols() != P.dim()) throw ArgumentError("image_bbox: map/polytope dimension mismatch");
    const Eigen::Index k = M.rows();
    Box out = Box::empty(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Vector row = M.row(i).transpose();
        const LpOutcome lo = solve_lp(row, P, LpSense::Minimize);
        if (lo.status == LpStatus::Infeasible) return Box::empty(k);
        if (lo.status == LpStatus::Unbounded) throw ArgumentError("bbox: polytope is unbounded");
        const LpOutcome hi = solve_lp(row, P, LpSense::Maximize);
        if (hi.status == LpStatus::Infeasible) return Box::empty(k);
        if (hi.status == LpStatus::Unbounded) throw ArgumentError("bbox: polytope is unbounded");
        out.lo(i) = lo.value;
        out.hi(i) = hi.value;
    }
    return out;
}

Box bbox(const HPolytope& P) { return image_bbox(P, Matrix::Identity(P.dim(), P.dim())); }

CenterExtent center_extent(const Box& box) {
    if (box.is_empty()) throw ArgumentError("center_extent: empty set");
    CenterExtent ce;
    ce.center = box.center();
    ce.extents = 0.5 * box.width();
    ce.extent = ce.extents.size() == 0 ? 0.0 : ce.extents.maxCoeff();
    return ce;
}

CenterExtent center_extent(const HPolytope& P) { return center_extent(bbox(P)); }

HPolytope intersect(const HPolytope& P, const HPolytope& Q) {
    if (P.dim() != Q.dim()) throw ArgumentError("intersect: dimension mismatch");
    Matrix C(P.C.rows() + Q.C.rows(), P.dim());
    C << P.C, Q.C;
    Vector d(P.d.size() + Q.d.size());
    d << P.d, Q.d;
    return HPolytope(std::move(C), std::move(d));
}

HPolytope intersect(const HPolytope& P, const Box& box) { return intersect(P, box.to_polytope()); }

HPolytope remove_redundant(const HPolytope& P, const Tolerances& tol) {
    bool infeasible = false;
    HPolytope Q = normalize_rows(P, 1e-14, infeasible);
    if (infeasible || !is_feasible(Q)) return canonical_empty(P.dim());

    std::vector<char> keep(static_cast<std::size_t>(Q.C.rows()), 1);
    for (Eigen::Index j = 0; j < Q.C.rows(); ++j) {
        std::vector<Eigen::Index> others;
        for (Eigen::Index k = 0; k < Q.C.rows(); ++k) {
            if (k != j && keep[static_cast<std::size_t>(k)]) others.push_back(k);
        }
        Matrix C(static_cast<Eigen::Index>(others.size()), Q.dim());
        Vector d(static_cast<Eigen::Index>(others.size()));
        for (std::size_t k = 0; k < others.size(); ++k) {
            C.row(static_cast<Eigen::Index>(k)) = Q.C.row(others[k]);
            d(static_cast<Eigen::Index>(k)) = Q.d(others[k]);
        }
        const LpOutcome out = solve_lp(Q.C.row(j).transpose(), C, d, LpSense::Maximize);
        if (out.optimal() && out.value <= Q.d(j) + tol.feasibility * Q.C.row(j).norm()) {
            keep[static_cast<std::size_t>(j)] = 0;
        }
    }
    std::vector<Eigen::Index> rows;
    for (Eigen::Index j = 0; j < Q.C.rows(); ++j) {
        if (keep[static_cast<std::size_t>(j)]) rows.push_back(j);
    }
    Matrix C(static_cast<Eigen::Index>(rows.size()), Q.dim());
    Vector d(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        C.row(static_cast<Eigen::Index>(k)) = Q.C.row(rows[k]);
        d(static_cast<Eigen::Index>(k)) = Q.d(rows[k]);
    }
    return HPolytope(std::move(C), std::move(d));
}

HPolytope fourier_motzkin(const HPolytope& P, Eigen::Index count, const Tolerances& tol) {
    if (count < 0 || count > P.dim()) throw ArgumentError("fourier_motzkin: bad variable count");
    HPolytope cur = P;
    for (Eigen::Index step = 0; step < count; ++step) {
        const Eigen::Index last = cur.dim() - 1;
        bool infeasible = false;
        cur = normalize_rows(cur, 1e-14, infeasible);
        if (infeasible) return canonical_empty(P.dim() - count);

        std::vector<Eigen::Index> pos, neg, zero;
        for (Eigen::Index j = 0; j < cur.C.rows(); ++j) {
            const double a = cur.C(j, last);
            if (a > 1e-12) {
                pos.push_back(j);
            } else if (a < -1e-12) {
                neg.push_back(j);
            } else {
                zero.push_back(j);
            }
        }
        const auto rows = static_cast<Eigen::Index>(zero.size() + pos.size() * neg.size());
        Matrix C(rows, last);
        Vector d(rows);
        Eigen::Index r = 0;
        for (const Eigen::Index j : zero) {
            C.row(r) = cur.C.row(j).head(last);
            d(r) = cur.d(j);
            ++r;
        }
        for (const Eigen::Index p : pos) {
            const double ap = cur.C(p, last);
            for (const Eigen::Index q : neg) {
                const double aq = -cur.C(q, last);
                C.row(r) = cur.C.row(p).head(last) / ap + cur.C.row(q).head(last) / aq;
                d(r) = cur.d(p) / ap + cur.d(q) / aq;
                ++r;
            }
        }
        cur = remove_redundant(HPolytope(std::move(C), std::move(d)), tol);
    }
    return cur;
}

HPolytope affine_image(const HPolytope& P, const Matrix& M, const Vector& c, const Tolerances& tol) {
    const Eigen::Index n = P.dim();
    if (M.rows() != n || M.cols() != n || c.size() != n) {
        throw ArgumentError("affine_image: map must be n x n with an n-vector offset");
    }
    const Eigen::FullPivLU<Matrix> lu(M);
    const double scale = std::max(induced_norm_inf(M), 1e-300);
    if (std::abs(lu.determinant()) > tol.singular * scale && lu.isInvertible()) {
        const Matrix Minv = lu.inverse();
        Matrix C = P.C * Minv;
        Vector d = P.d + C * c;
        return HPolytope(std::move(C), std::move(d));
    }

    // Variables ordered (y, x); x is eliminated.
    const Eigen::Index rows = P.C.rows() + 2 * n;
    Matrix C = Matrix::Zero(rows, 2 * n);
    Vector d(rows);
    C.block(0, n, P.C.rows(), n) = P.C;
    d.head(P.C.rows()) = P.d;
    const Eigen::Index off = P.C.rows();
    C.block(off, 0, n, n) = Matrix::Identity(n, n);
    C.block(off, n, n, n) = -M;
    d.segment(off, n) = c;
    C.block(off + n, 0, n, n) = -Matrix::Identity(n, n);
    C.block(off + n, n, n, n) = M;
    d.segment(off + n, n) = -c;
    return fourier_motzkin(HPolytope(std::move(C), std::move(d)), n, tol);
}

Box interval_matvec(const Matrix& B, const Box& U) {
    if (B.cols() != U.dim()) throw ArgumentError("interval_matvec: dimension mismatch");
    Box out(Vector::Zero(B.rows()), Vector::Zero(B.rows()));
    for (Eigen::Index i = 0; i < B.rows(); ++i) {
        for (Eigen::Index j = 0; j < B.cols(); ++j) {
            const double a = B(i, j);
            if (a >= 0.0) {
                out.lo(i) += a * U.lo(j);
                out.hi(i) += a * U.hi(j);
            } else {
                out.lo(i) += a * U.hi(j);
                out.hi(i) += a * U.lo(j);
            }
        }
    }
    return out;
}

HPolytope inflate(const HPolytope& P, double delta) {
    Vector d = P.d;
    for (Eigen::Index j = 0; j < P.C.rows(); ++j) d(j) += delta * P.C.row(j).norm();
    return HPolytope(P.C, std::move(d));
}

HPolytope ensure_full_dimensional(const HPolytope& P, double min_radius, const Tolerances& tol) {
    const auto ball = chebyshev_center(P, tol);
    if (!ball) throw ArgumentError("ensure_full_dimensional: empty polytope");
    if (ball->radius >= min_radius) return P;
    return inflate(P, 2.0 * min_radius - ball->radius);
}

}  // namespace tllreach
