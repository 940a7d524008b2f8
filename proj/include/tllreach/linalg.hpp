#pragma once

#include <Eigen/Dense>

namespace tllreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Max-norm of a vector.
inline double norm_inf(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

/// Induced infinity norm of a matrix (max absolute row sum).
inline double induced_norm_inf(const Matrix& m) {
    return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace tllreach
