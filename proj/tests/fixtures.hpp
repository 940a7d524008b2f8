#pragma once

#include "tllreach/polytope.hpp"
#include "tllreach/tll_model.hpp"

namespace fixtures {

using namespace tllreach;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const double x : xs) v(i++) = x;
    return v;
}

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index r = 0;
    for (const auto& row : rows) {
        Eigen::Index c = 0;
        for (const double x : row) m(r, c++) = x;
        ++r;
    }
    return m;
}

inline Box box(std::initializer_list<double> lo, std::initializer_list<double> hi) { return Box(vec(lo), vec(hi)); }

/// [-1, 1]^n
inline HPolytope unit_cube(Eigen::Index n) {
    return Box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)).to_polytope();
}

/// l_1(x) = x_1 with a single group, on R^n.
inline ScalarTLL first_coordinate(Eigen::Index n) {
    Matrix W = Matrix::Zero(1, n);
    W(0, 0) = 1.0;
    return ScalarTLL(W, Vector::Zero(1), {{0}});
}

/// max(x, -x) = |x| on R^1: l_1 = x, l_2 = -x, s_1 = {1}, s_2 = {2}.
inline ScalarTLL abs_tll() { return ScalarTLL(mat({{1.0}, {-1.0}}), vec({0.0, 0.0}), {{0}, {1}}); }

/// min over one group of both functions: -|x|.
inline ScalarTLL neg_abs_tll() { return ScalarTLL(mat({{1.0}, {-1.0}}), vec({0.0, 0.0}), {{0, 1}}); }

/// Constant controller u = value (single function with zero weights).
inline TLLController constant_controller(Eigen::Index n, double value) {
    return TLLController({ScalarTLL(Matrix::Zero(1, n), vec({value}), {{0}})});
}

}  // namespace fixtures
