#include "tllreach/tll_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>
#include <string>

#include "tllreach/errors.hpp"

namespace tllreach {

namespace {

bool rows_bit_identical(const Matrix& W, const Vector& b, Eigen::Index i, Eigen::Index j) {
    if (std::memcmp(&b(i), &b(j), sizeof(double)) != 0) return false;
    for (Eigen::Index c = 0; c < W.cols(); ++c) {
        const double wi = W(i, c);
        const double wj = W(j, c);
        if (std::memcmp(&wi, &wj, sizeof(double)) != 0) return false;
    }
    return true;
}

// Uniform double on [lo, hi) from the raw 64-bit stream, so that generated
// instances do not depend on the standard library's distribution code.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : rng_(seed) {}
    double operator()(double lo, double hi) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    std::uint64_t bits() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

ScalarTLL random_scalar(Uniform& rnd, int n, int N, int M) {
    Matrix W(N, n);
    Vector b(N);
    for (int i = 0; i < N; ++i) {
        for (int c = 0; c < n; ++c) W(i, c) = rnd(-1.0, 1.0);
        b(i) = rnd(-1.0, 1.0);
    }
    std::vector<std::vector<int>> sel(static_cast<std::size_t>(M));
    for (auto& group : sel) {
        for (int i = 0; i < N; ++i) {
            if (rnd.bits() & 1u) group.push_back(i);
        }
        if (group.empty()) group.push_back(static_cast<int>(rnd.bits() % static_cast<std::uint64_t>(N)));
    }
    return ScalarTLL(std::move(W), std::move(b), std::move(sel));
}

}  // namespace

ScalarTLL::ScalarTLL(Matrix weights, Vector biases, std::vector<std::vector<int>> selectors)
    : weights_(std::move(weights)), biases_(std::move(biases)), selectors_(std::move(selectors)) {
    const Eigen::Index N = weights_.rows();
    if (N < 1) throw ValidationError("TLL needs at least one local linear function (N >= 1)");
    if (weights_.cols() < 1) throw ValidationError("TLL input dimension must be >= 1");
    if (biases_.size() != N) {
        throw ValidationError("TLL bias vector has " + std::to_string(biases_.size()) +
                              " entries, expected N = " + std::to_string(N));
    }
    if (selectors_.empty()) throw ValidationError("TLL needs at least one selector group (M >= 1)");
    if (!weights_.allFinite() || !biases_.allFinite()) throw ValidationError("TLL parameters must be finite");
    for (std::size_t j = 0; j < selectors_.size(); ++j) {
        auto& group = selectors_[j];
        if (group.empty()) throw ValidationError("selector set " + std::to_string(j + 1) + " is empty");
        for (const int i : group) {
            if (i < 0 || i >= N) {
                throw ValidationError("selector set " + std::to_string(j + 1) + " references index " +
                                      std::to_string(i + 1) + " outside 1.." + std::to_string(N));
            }
        }
        std::sort(group.begin(), group.end());
        group.erase(std::unique(group.begin(), group.end()), group.end());
    }
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index j = i + 1; j < N; ++j) {
            if (rows_bit_identical(weights_, biases_, i, j)) {
                throw ValidationError("local linear functions " + std::to_string(i + 1) + " and " +
                                      std::to_string(j + 1) + " are identical");
            }
        }
    }
}

double ScalarTLL::eval(const Vector& x) const {
    if (x.size() != input_dim()) {
        throw ArgumentError("TLL eval: input has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(input_dim()));
    }
    const Vector values = weights_ * x + biases_;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& group : selectors_) {
        double group_min = std::numeric_limits<double>::infinity();
        for (const int i : group) group_min = std::min(group_min, values(i));
        best = std::max(best, group_min);
    }
    return best;
}

int ScalarTLL::active_index(const Vector& x) const {
    if (x.size() != input_dim()) throw ArgumentError("TLL active_index: dimension mismatch");
    const Vector values = weights_ * x + biases_;
    int winner = -1;
    double best = 0.0;
    for (const auto& group : selectors_) {
        int arg = group.front();
        for (const int i : group) {
            if (values(i) < values(arg)) arg = i;
        }
        if (winner < 0 || values(arg) > best) {
            winner = arg;
            best = values(arg);
        }
    }
    return winner;
}

double ScalarTLL::lipschitz_bound() const { return weights_.cwiseAbs().rowwise().sum().maxCoeff(); }

TLLController::TLLController(std::vector<ScalarTLL> components) : components_(std::move(components)) {
    if (components_.empty()) throw ValidationError("controller needs at least one output component");
    const auto& first = components_.front();
    for (std::size_t k = 1; k < components_.size(); ++k) {
        const auto& c = components_[k];
        if (c.input_dim() != first.input_dim() || c.num_functions() != first.num_functions() ||
            c.num_groups() != first.num_groups()) {
            throw ValidationError("component " + std::to_string(k + 1) + " has size (n=" +
                                  std::to_string(c.input_dim()) + ", N=" + std::to_string(c.num_functions()) +
                                  ", M=" + std::to_string(c.num_groups()) + "), expected (n=" +
                                  std::to_string(first.input_dim()) + ", N=" +
                                  std::to_string(first.num_functions()) + ", M=" +
                                  std::to_string(first.num_groups()) + ")");
        }
    }
}

Vector TLLController::eval(const Vector& x) const {
    Vector u(output_dim());
    for (Eigen::Index k = 0; k < output_dim(); ++k) u(k) = component(k).eval(x);
    return u;
}

std::vector<int> TLLController::active_indices(const Vector& x) const {
    std::vector<int> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.active_index(x));
    return out;
}

double TLLController::lipschitz_bound() const {
    double best = 0.0;
    for (const auto& c : components_) best = std::max(best, c.lipschitz_bound());
    return best;
}

TLLController TLLController::scaled_weights(double factor) const {
    std::vector<ScalarTLL> scaled;
    for (const auto& c : components_) scaled.emplace_back(c.weights() * factor, c.biases(), c.selectors());
    return TLLController(std::move(scaled));
}

LTISystem::LTISystem(Matrix a, Matrix b) : A(std::move(a)), B(std::move(b)) {
    if (A.rows() != A.cols()) throw ValidationError("A must be square");
    if (B.rows() != A.rows()) {
        throw ValidationError("B has " + std::to_string(B.rows()) + " rows, expected n = " +
                              std::to_string(A.rows()));
    }
}

void LTISystem::check_compatible(const TLLController& ctrl) const {
    if (ctrl.input_dim() != state_dim()) {
        throw ValidationError("controller input dimension " + std::to_string(ctrl.input_dim()) +
                              " does not match state dimension " + std::to_string(state_dim()));
    }
    if (ctrl.output_dim() != input_dim()) {
        throw ValidationError("controller output dimension " + std::to_string(ctrl.output_dim()) +
                              " does not match B's " + std::to_string(input_dim()) + " columns");
    }
}

TLLController random_controller(int n, int m, int N, int M, std::uint64_t seed) {
    if (n < 1 || m < 1 || N < 1 || M < 1) throw ArgumentError("random_controller: sizes must be >= 1");
    Uniform rnd(seed);
    std::vector<ScalarTLL> comps;
    for (int k = 0; k < m; ++k) comps.push_back(random_scalar(rnd, n, N, M));
    return TLLController(std::move(comps));
}

Problem random_problem(int n, int m, int N, int M, std::uint64_t seed, double epsilon, int steps) {
    if (n < 1 || m < 1 || N < 1 || M < 1) throw ArgumentError("random_problem: sizes must be >= 1");
    Uniform rnd(seed);
    std::vector<ScalarTLL> comps;
    for (int k = 0; k < m; ++k) comps.push_back(random_scalar(rnd, n, N, M));

    Matrix A(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) A(r, c) = rnd(-1.0, 1.0);
    }
    const double a_norm = induced_norm_inf(A);
    if (a_norm > 0.0) A *= 0.9 / a_norm;
    Matrix B(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) B(r, c) = rnd(-1.0, 1.0);
    }

    Vector center(n);
    for (int i = 0; i < n; ++i) center(i) = rnd(-2.0, 2.0);
    Matrix G(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) G(r, c) = rnd(-1.0, 1.0);
    }
    Matrix R = Eigen::HouseholderQR<Matrix>(G).householderQ();
    if (R.determinant() < 0.0) R.col(0) *= -1.0;

    // x = center + R z with |z|_inf <= 1  <=>  -1 <= R^T (x - center) <= 1.
    Matrix C(2 * n, n);
    Vector d(2 * n);
    const Vector shift = R.transpose() * center;
    C.topRows(n) = R.transpose();
    C.bottomRows(n) = -R.transpose();
    d.head(n) = shift.array() + 1.0;
    d.tail(n) = 1.0 - shift.array();

    return Problem{TLLController(std::move(comps)), LTISystem(std::move(A), std::move(B)),
                   HPolytope(std::move(C), std::move(d)), epsilon, steps};
}

}  // namespace tllreach
