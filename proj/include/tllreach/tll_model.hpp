#pragma once

#include <cstdint>
#include <vector>

#include "tllreach/linalg.hpp"
#include "tllreach/polytope.hpp"

namespace tllreach {

/// Scalar Two-Level Lattice network: max over groups j of min over i in s_j
/// of the local linear function l_i(x) = w_i . x + b_i.
///
/// Selector sets are stored 0-based, sorted and duplicate-free. Construction
/// validates every invariant and throws ValidationError otherwise.
class ScalarTLL {
public:
    ScalarTLL(Matrix weights, Vector biases, std::vector<std::vector<int>> selectors);

    Eigen::Index input_dim() const { return weights_.cols(); }
    Eigen::Index num_functions() const { return weights_.rows(); }
    Eigen::Index num_groups() const { return static_cast<Eigen::Index>(selectors_.size()); }

    const Matrix& weights() const { return weights_; }
    const Vector& biases() const { return biases_; }
    const std::vector<std::vector<int>>& selectors() const { return selectors_; }

    double local(Eigen::Index i, const Vector& x) const { return weights_.row(i).dot(x) + biases_(i); }

    double eval(const Vector& x) const;

    /// Index of the active local linear function at x: argmin inside each
    /// group, then argmax over groups; ties go to the lowest index.
    int active_index(const Vector& x) const;

    /// max_i ||w_i||_1
    double lipschitz_bound() const;

private:
    Matrix weights_;
    Vector biases_;
    std::vector<std::vector<int>> selectors_;
};

/// Multi-output TLL: m equally sized scalar components.
class TLLController {
public:
    explicit TLLController(std::vector<ScalarTLL> components);

    Eigen::Index input_dim() const { return components_.front().input_dim(); }
    Eigen::Index output_dim() const { return static_cast<Eigen::Index>(components_.size()); }
    Eigen::Index num_functions() const { return components_.front().num_functions(); }
    Eigen::Index num_groups() const { return components_.front().num_groups(); }

    const std::vector<ScalarTLL>& components() const { return components_; }
    const ScalarTLL& component(Eigen::Index k) const { return components_.at(static_cast<std::size_t>(k)); }

    Vector eval(const Vector& x) const;
    std::vector<int> active_indices(const Vector& x) const;

    /// Lipschitz constant w.r.t. the max-norm on input and output; exact for
    /// non-degenerate controllers.
    double lipschitz_bound() const;

    /// Controller with every weight matrix multiplied by `factor`.
    TLLController scaled_weights(double factor) const;

private:
    std::vector<ScalarTLL> components_;
};

/// x_{t+1} = A x_t + B u_t
struct LTISystem {
    Matrix A;
    Matrix B;

    LTISystem() = default;
    LTISystem(Matrix a, Matrix b);

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return B.cols(); }

    Vector step(const Vector& x, const Vector& u) const { return A * x + B * u; }

    /// Throws ValidationError when the controller does not fit the system.
    void check_compatible(const TLLController& ctrl) const;
};

/// Everything needed to run a reachability analysis.
struct Problem {
    TLLController controller;
    LTISystem system;
    HPolytope initial_set;
    double epsilon = 0.1;
    int steps = 3;
};

/// Random closed-loop instance; deterministic in the seed.
///
/// Weights, biases, and B entries are uniform on [-1, 1]; A is uniform on
/// [-1, 1] rescaled to induced infinity norm 0.9; X_0 is a randomly rotated
/// box of half-width 1 centered uniformly in [-2, 2]^n.
Problem random_problem(int n, int m, int N, int M, std::uint64_t seed, double epsilon = 0.1,
                       int steps = 3);

/// Random controller alone (same distributions as random_problem).
TLLController random_controller(int n, int m, int N, int M, std::uint64_t seed);

}  // namespace tllreach
