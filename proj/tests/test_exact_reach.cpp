#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tllreach/arrangement.hpp"
#include "tllreach/exact_reach.hpp"

using namespace tllreach;
using fixtures::mat;
using fixtures::vec;

namespace {

std::vector<Vector> sample(const HPolytope& P, std::mt19937_64& rng, std::size_t count) {
    return oracle::sample_polytope(P, bbox(P), rng, count);
}

}  // namespace

TEST_CASE("zero input matrix reduces to the linear image") {
    const Problem prob = random_problem(2, 1, 4, 4, 1);
    const LTISystem sys(prob.system.A, Matrix::Zero(2, 1));
    const ReachSet reach = one_step_exact(sys, prob.controller, prob.initial_set);
    CHECK(reach.pieces.size() >= 1);
    const HPolytope image = affine_image(prob.initial_set, sys.A, Vector::Zero(2));
    std::mt19937_64 rng(3);
    for (const auto& x : sample(prob.initial_set, rng, 2000)) CHECK(reach.contains(sys.A * x, 1e-7));
    for (const auto& piece : reach.pieces) {
        for (const auto& y : sample(piece.polytope, rng, 200)) CHECK(image.max_violation(y) <= 1e-7);
    }
    const Box a = reach.bounding_box();
    const Box b = bbox(image);
    CHECK((a.lo - b.lo).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((a.hi - b.hi).cwiseAbs().maxCoeff() < 1e-7);
    const Box c = one_step_exact_bbox(sys, prob.controller, prob.initial_set);
    CHECK((c.lo - b.lo).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((c.hi - b.hi).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("single affine controller gives one piece") {
    const ScalarTLL tll(mat({{0.3, -0.7}}), vec({0.25}), {{0}});
    const TLLController ctrl({tll});
    const LTISystem sys(mat({{0.5, 0.1}, {-0.2, 0.4}}), mat({{1.0}, {0.5}}));
    const HPolytope X = fixtures::unit_cube(2);
    const ReachSet reach = one_step_exact(sys, ctrl, X);
    REQUIRE(reach.pieces.size() == 1);
    const Matrix lin = sys.A + sys.B * tll.weights();
    const Vector off = sys.B * tll.biases();
    const Box expected = bbox(affine_image(X, lin, off));
    const Box got = reach.bounding_box();
    CHECK((got.lo - expected.lo).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((got.hi - expected.hi).cwiseAbs().maxCoeff() < 1e-9);
    const Box eb = one_step_exact_bbox(sys, ctrl, X);
    CHECK((eb.lo - expected.lo).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((eb.hi - expected.hi).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("closed loop map") {
    const TLLController ctrl({fixtures::abs_tll()});
    const LTISystem sys(mat({{2.0}}), mat({{3.0}}));
    const ClosedLoopMap neg = closed_loop_map(sys, ctrl, {1});
    CHECK(neg.linear(0, 0) == -1.0);
    CHECK(neg.offset(0) == 0.0);
    // 2x + 3|x| over [-1, 1] is [0, 5]
    const Box b = one_step_exact_bbox(sys, ctrl, fixtures::unit_cube(1));
    CHECK(std::abs(b.lo(0)) < 1e-9);
    CHECK(b.hi(0) == doctest::Approx(5.0));
}

TEST_CASE("soundness and pull-back on a random instance") {
    const Problem prob = random_problem(2, 1, 4, 4, 7);
    const ReachSet reach = one_step_exact(prob.system, prob.controller, prob.initial_set);
    REQUIRE_FALSE(reach.pieces.empty());
    std::mt19937_64 rng(11);
    int escaped = 0;
    for (const auto& x : sample(prob.initial_set, rng, 10000)) {
        escaped += reach.contains(prob.system.step(x, prob.controller.eval(x)), 1e-7) ? 0 : 1;
    }
    CHECK(escaped == 0);

    for (const auto& piece : reach.pieces) {
        const ClosedLoopMap f = closed_loop_map(prob.system, prob.controller, piece.active);
        if (std::abs(f.linear.determinant()) < 1e-9) continue;
        const Matrix inv = f.linear.inverse();
        for (const auto& y : sample(piece.polytope, rng, 1000)) {
            CHECK(prob.initial_set.max_violation(inv * (y - f.offset)) <= 1e-7);
        }
    }
}

TEST_CASE("exact box equals the bounding box of the pieces") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Problem prob = random_problem(2, 1, 6, 5, seed);
        const Box a = one_step_exact(prob.system, prob.controller, prob.initial_set).bounding_box();
        const Box b = one_step_exact_bbox(prob.system, prob.controller, prob.initial_set);
        CHECK((a.lo - b.lo).cwiseAbs().maxCoeff() < 1e-7);
        CHECK((a.hi - b.hi).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("exact box is tight against dense sampling") {
    const Problem prob = random_problem(2, 1, 4, 4, 21);
    const Box b = one_step_exact_bbox(prob.system, prob.controller, prob.initial_set);
    std::mt19937_64 rng(1);
    const auto pts = sample(prob.initial_set, rng, 100000);
    Box seen = Box::empty(2);
    for (const auto& x : pts) {
        const Vector y = prob.system.step(x, prob.controller.eval(x));
        seen.merge(Box(y, y));
    }
    CHECK(b.contains(seen, 1e-9));
    for (Eigen::Index i = 0; i < 2; ++i) {
        CHECK(seen.lo(i) - b.lo(i) <= 1e-2 * b.width()(i));
        CHECK(b.hi(i) - seen.hi(i) <= 1e-2 * b.width()(i));
    }
}

TEST_CASE("piece count is bounded by the planar bound") {
    const Problem prob = random_problem(2, 1, 6, 6, 2);
    const ReachSet reach = one_step_exact(prob.system, prob.controller, prob.initial_set);
    const std::size_t K = pairwise_difference_hyperplanes(prob.controller).size();
    CHECK(K <= 15);
    CHECK(reach.pieces.size() <= 1 + K + K * (K - 1) / 2);
    // sorted by sign vector
    for (std::size_t i = 1; i < reach.pieces.size(); ++i) CHECK(reach.pieces[i - 1].signs < reach.pieces[i].signs);
}

TEST_CASE("realized functions") {
    CHECK(realized_functions(TLLController({fixtures::first_coordinate(2)}), fixtures::unit_cube(2)) ==
          std::vector<std::set<int>>{{0}});
    const TLLController absx({fixtures::abs_tll()});
    CHECK(realized_functions(absx, fixtures::unit_cube(1)) == std::vector<std::set<int>>{{0, 1}});
    CHECK(is_non_degenerate(absx, fixtures::unit_cube(1)));
    CHECK_FALSE(is_non_degenerate(absx, fixtures::box({0.5}, {1.0}).to_polytope()));

    const TLLController ctrl = random_controller(2, 2, 6, 4, 13);
    const HPolytope domain = fixtures::box({-3, -3}, {3, 3}).to_polytope();
    const auto realized = realized_functions(ctrl, domain);
    std::mt19937_64 rng(2);
    const auto pts = sample(domain, rng, 20000);
    for (Eigen::Index k = 0; k < 2; ++k) {
        for (const int i : realized[static_cast<std::size_t>(k)]) {
            bool found = false;
            for (const auto& x : pts) {
                if (std::abs(ctrl.eval(x)(k) - ctrl.component(k).local(i, x)) <= 1e-9) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("affine regions cover the domain") {
    const TLLController ctrl = random_controller(2, 1, 5, 3, 4);
    const HPolytope domain = fixtures::box({-2, -2}, {2, 2}).to_polytope();
    const auto regions = affine_regions(ctrl, domain);
    std::mt19937_64 rng(9);
    for (const auto& x : sample(domain, rng, 2000)) {
        bool covered = false;
        for (const auto& r : regions) {
            if (r.region.max_violation(x) <= 1e-9) {
                covered = true;
                CHECK(std::abs(ctrl.component(0).local(r.active[0], x) - ctrl.eval(x)(0)) <= 1e-7);
            }
        }
        CHECK(covered);
    }
}
