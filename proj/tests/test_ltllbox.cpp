#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tllreach/errors.hpp"
#include "tllreach/exact_reach.hpp"
#include "tllreach/ltllbox.hpp"

using namespace tllreach;
using fixtures::mat;
using fixtures::vec;

namespace {

void check_eps_box(const Box& got, const Box& exact, double eps) {
    CHECK(got.contains(exact, 1e-9));
    CHECK((got.hi - exact.hi).maxCoeff() <= eps + 1e-7);
    CHECK((exact.lo - got.lo).maxCoeff() <= eps + 1e-7);
}

}  // namespace

TEST_CASE("method names") {
    CHECK(parse_box_method("exact-box") == BoxMethod::ExactBox);
    CHECK(parse_box_method("exact_box") == BoxMethod::ExactBox);
    CHECK(parse_box_method("grid") == BoxMethod::Grid);
    CHECK(parse_box_method("ltllbox") == BoxMethod::LTLLBox);
    CHECK(parse_box_method("auto") == BoxMethod::Auto);
    CHECK_THROWS_AS(parse_box_method("bogus"), ArgumentError);
    CHECK(to_string(BoxMethod::ExactBox) == "exact-box");
}

TEST_CASE("depth limit") {
    CHECK(ltllbox_depth_limit(1.0, 1.0, 1.0, 0.1) == 6);  // log2(40) = 5.32
    CHECK(ltllbox_depth_limit(1.0, 0.0, 1.0, 0.1) == 0);
    CHECK(ltllbox_depth_limit(0.01, 1.0, 1.0, 0.1) == 0);
}

TEST_CASE("zero input matrix accepts at the root") {
    const Problem prob = random_problem(2, 1, 6, 6, 4);
    const LTISystem sys(prob.system.A, Matrix::Zero(2, 1));
    LTLLBoxStats stats;
    const Box got = one_step_ltllbox(sys, prob.controller, prob.initial_set, 0.1, {}, &stats);
    CHECK(stats.nodes == 1);
    CHECK(stats.max_depth == 0);
    check_eps_box(got, image_bbox(prob.initial_set, sys.A), 0.1);
}

TEST_CASE("constant controller accepts at the root") {
    const LTISystem sys(mat({{0.5, 0.2}, {-0.1, 0.7}}), mat({{1.0}, {-2.0}}));
    const HPolytope X = fixtures::box({-1, 0}, {1, 2}).to_polytope();
    LTLLBoxStats stats;
    const Box got = one_step_ltllbox(sys, fixtures::constant_controller(2, 0.75), X, 0.1, {}, &stats);
    CHECK(stats.nodes == 1);
    check_eps_box(got, image_bbox(X, sys.A).translated(sys.B * vec({0.75})), 0.1);
}

TEST_CASE("random instances agree with the exact box") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Problem prob = random_problem(2, 1, 8, 8, seed);
        const Box exact = one_step_exact_bbox(prob.system, prob.controller, prob.initial_set);
        LTLLBoxStats stats;
        const Box got = one_step_ltllbox(prob.system, prob.controller, prob.initial_set, 0.1, {}, &stats);
        check_eps_box(got, exact, 0.1);
        CHECK(stats.max_depth <= stats.depth_limit);
        for (std::size_t d = 0; d < stats.per_depth.size(); ++d) {
            CHECK(static_cast<double>(stats.per_depth[d]) <= std::pow(2.0, 2.0 * static_cast<double>(d)));
        }
        const Box grid = one_step_grid_bbox(prob.system, prob.controller, prob.initial_set, 0.1);
        CHECK((grid.lo - got.lo).cwiseAbs().maxCoeff() <= 0.1 + 1e-7);
        CHECK((grid.hi - got.hi).cwiseAbs().maxCoeff() <= 0.1 + 1e-7);
    }
}

TEST_CASE("coarse epsilon on a two-output controller") {
    const Problem prob = random_problem(2, 2, 5, 4, 6, 0.3);
    const Box exact = one_step_exact_bbox(prob.system, prob.controller, prob.initial_set);
    check_eps_box(one_step_ltllbox(prob.system, prob.controller, prob.initial_set, 0.3), exact, 0.3);
    CHECK_THROWS_AS(one_step_ltllbox(prob.system, prob.controller, prob.initial_set, 0.0), ArgumentError);
}

TEST_CASE("cost model") {
    CHECK(lp_cost(10.0, 3.0) == 90.0);
    // 1^4 * 4 * 2 * 2^7 * LP(1*4 + 4, 2) / 2!
    CHECK(exact_box_cost(2, 1, 2, 2, 4) == 16384.0);
    CHECK(grid_cost(2, 1.0, 1.0, 1.0, 0.1) == doctest::Approx(40.0 * 40.0 * 16.0));
    CHECK(grid_cost(2, 1.0, 0.0, 1.0, 0.1) == 16.0);
}

TEST_CASE("method selection limits") {
    const Problem small = random_problem(2, 1, 2, 2, 0);
    CHECK(select_method(small.system, small.controller, small.initial_set, 1e-3).method == BoxMethod::ExactBox);
    const Problem big = random_problem(2, 1, 32, 32, 0);
    const CostEstimate loose = select_method(big.system, big.controller, big.initial_set, 1.0);
    CHECK(loose.method == BoxMethod::Grid);
    CHECK(loose.predicted_ops == loose.grid_ops);
}

TEST_CASE("method selection golden values") {
    // random_problem(2, 1, 2, 2, 0): ext = 1.1477343442220569,
    // ||B|| = 0.49076988975364078, L = 1.664703692518736, four rows in X_0.
    const Problem prob = random_problem(2, 1, 2, 2, 0);
    CHECK(center_extent(prob.initial_set).extent == doctest::Approx(1.1477343442220569).epsilon(1e-12));
    CHECK(induced_norm_inf(prob.system.B) == doctest::Approx(0.49076988975364078).epsilon(1e-14));
    CHECK(prob.controller.lipschitz_bound() == doctest::Approx(1.664703692518736).epsilon(1e-14));

    // (2 * 1.1477 * 2 * 0.4908 * 1.6647 / 0.1)^2 * 16 = 22508.80; within 10x of 16384
    const CostEstimate mid = select_method(prob.system, prob.controller, prob.initial_set, 0.1);
    CHECK(mid.method == BoxMethod::LTLLBox);
    CHECK(mid.exact_ops == 16384.0);
    CHECK(mid.grid_ops == doctest::Approx(22508.804288239458).epsilon(1e-9));
    CHECK(mid.predicted_ops == 16384.0);

    const CostEstimate coarse = select_method(prob.system, prob.controller, prob.initial_set, 1.0);
    CHECK(coarse.method == BoxMethod::Grid);
    CHECK(coarse.grid_ops == doctest::Approx(225.08804288239463).epsilon(1e-9));

    const CostEstimate fine = select_method(prob.system, prob.controller, prob.initial_set, 0.03);
    CHECK(fine.method == BoxMethod::ExactBox);
    CHECK(fine.grid_ops == doctest::Approx(250097.82542488293).epsilon(1e-9));
}

TEST_CASE("identity dynamics without input") {
    const LTISystem sys(Matrix::Identity(2, 2), Matrix::Zero(2, 1));
    const TLLController ctrl = random_controller(2, 1, 4, 4, 1);
    const Box X0 = fixtures::box({-1, 0.5}, {0.5, 2});
    for (const BoxMethod m : {BoxMethod::ExactBox, BoxMethod::Grid, BoxMethod::LTLLBox, BoxMethod::Auto}) {
        const PropagationResult r = propagate(sys, ctrl, X0.to_polytope(), 0.1, 3, m);
        REQUIRE(r.boxes.size() == 3);
        REQUIRE(r.methods.size() == 3);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(r.boxes[t].contains(X0, 1e-9));
            CHECK(X0.inflated(0.05 * static_cast<double>(t + 1)).contains(r.boxes[t], 1e-9));
        }
        CHECK(r.estimates.size() == (m == BoxMethod::Auto ? 3u : 0u));
    }
}

TEST_CASE("a single step equals the one-step operation") {
    const Problem prob = random_problem(2, 1, 6, 6, 12);
    for (const BoxMethod m : {BoxMethod::ExactBox, BoxMethod::Grid, BoxMethod::LTLLBox}) {
        const PropagationResult r = propagate(prob.system, prob.controller, prob.initial_set, 0.1, 1, m);
        const Box direct = one_step_box(prob.system, prob.controller, prob.initial_set, 0.1, m);
        REQUIRE(r.boxes.size() == 1);
        CHECK(r.boxes[0].lo == direct.lo);
        CHECK(r.boxes[0].hi == direct.hi);
    }
}

TEST_CASE("propagated boxes contain sampled trajectories") {
    const Problem prob = random_problem(2, 1, 8, 8, 0);
    const PropagationResult r = propagate(prob.system, prob.controller, prob.initial_set, 0.1, 3, BoxMethod::LTLLBox);
    REQUIRE(r.boxes.size() == 3);
    CHECK(r.stats.ltllbox.nodes > 0);
    CHECK(r.stats.lp_calls > 0);
    std::mt19937_64 rng(99);
    const auto starts = oracle::sample_polytope(prob.initial_set, bbox(prob.initial_set), rng, 10000);
    int escaped = 0;
    for (Vector x : starts) {
        for (std::size_t t = 0; t < 3; ++t) {
            x = prob.system.step(x, prob.controller.eval(x));
            escaped += r.boxes[t].contains(x, 1e-9) ? 0 : 1;
        }
    }
    CHECK(escaped == 0);
}

TEST_CASE("cost guard aborts with the partial prefix") {
    const Problem prob = random_problem(2, 1, 8, 8, 1);
    PropagationOptions opts;
    opts.grid.max_cubes = 1e4;
    try {
        (void)propagate(prob.system, prob.controller, prob.initial_set, 0.02, 3, BoxMethod::Grid, opts);
        FAIL("expected the cost guard");
    } catch (const PropagationError& e) {
        CHECK(e.cost_guard());
        CHECK(e.partial().boxes.empty());
    }
    CHECK_THROWS_AS(propagate(prob.system, prob.controller, prob.initial_set, 0.1, 0, BoxMethod::Grid), ArgumentError);
}
