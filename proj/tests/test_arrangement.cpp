#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tllreach/arrangement.hpp"

using namespace tllreach;
using fixtures::mat;
using fixtures::vec;

namespace {

/// K random lines whose pairwise intersections all lie inside [-50, 50]^2.
std::vector<Hyperplane> generic_lines(std::mt19937_64& rng, int K) {
    std::uniform_real_distribution<double> angle(0.0, M_PI);
    std::uniform_real_distribution<double> offset(-2.0, 2.0);
    for (;;) {
        std::vector<Hyperplane> lines;
        for (int k = 0; k < K; ++k) {
            const double a = angle(rng);
            lines.push_back({vec({std::cos(a), std::sin(a)}), offset(rng)});
        }
        bool ok = true;
        for (int i = 0; i < K && ok; ++i) {
            for (int j = i + 1; j < K && ok; ++j) {
                Matrix M(2, 2);
                M.row(0) = lines[static_cast<std::size_t>(i)].w;
                M.row(1) = lines[static_cast<std::size_t>(j)].w;
                if (std::abs(M.determinant()) < 0.05) {
                    ok = false;
                    break;
                }
                const Vector p = M.inverse() * vec({lines[static_cast<std::size_t>(i)].b, lines[static_cast<std::size_t>(j)].b});
                if (p.cwiseAbs().maxCoeff() > 50.0) ok = false;
            }
        }
        if (ok) return lines;
    }
}

std::vector<signed char> signs_at(const NormalizedArrangement& arr, const Vector& x, double band, bool& near) {
    std::vector<signed char> s;
    near = false;
    for (const auto& h : arr.planes) {
        const double v = h.w.dot(x) - h.b;
        if (std::abs(v) < band) near = true;
        s.push_back(v > 0.0 ? 1 : -1);
    }
    return s;
}

}  // namespace

TEST_CASE("no hyperplanes gives the domain") {
    const auto cells = enumerate_cells(std::vector<Hyperplane>{}, fixtures::unit_cube(2));
    REQUIRE(cells.size() == 1);
    CHECK(cells.front().signs.empty());
    CHECK(fixtures::unit_cube(2).contains(cells.front().witness, 0.0));
}

TEST_CASE("one hyperplane splits the square") {
    const std::vector<Hyperplane> hs{{vec({1.0, 0.0}), 0.0}};
    const auto cells = enumerate_cells(hs, fixtures::unit_cube(2));
    REQUIRE(cells.size() == 2);
    int plus = 0, minus = 0;
    for (const auto& c : cells) {
        REQUIRE(c.signs.size() == 1);
        (c.signs[0] > 0 ? plus : minus) += 1;
        CHECK(c.signs[0] * c.witness(0) > 0.0);
        CHECK(c.radius >= 1e-8);
    }
    CHECK(plus == 1);
    CHECK(minus == 1);
}

TEST_CASE("hyperplanes missing the domain do not split it") {
    const std::vector<Hyperplane> hs{{vec({1.0, 0.0}), 5.0}, {vec({0.0, 1.0}), -3.0}};
    const auto cells = enumerate_cells(hs, fixtures::unit_cube(2));
    REQUIRE(cells.size() == 1);
    CHECK(cells.front().signs == std::vector<signed char>{-1, 1});
}

TEST_CASE("duplicates up to scaling are merged") {
    const std::vector<Hyperplane> hs{
        {vec({1.0, 2.0}), 0.5}, {vec({-2.0, -4.0}), -1.0}, {vec({0.5, 1.0}), 0.25}, {vec({0.0, 0.0}), -1.0}};
    const NormalizedArrangement arr = normalize_hyperplanes(hs);
    REQUIRE(arr.planes.size() == 1);
    CHECK(arr.source_to_plane == std::vector<int>{0, 0, 0, -1});
    CHECK(arr.source_flipped[1]);
    CHECK_FALSE(arr.source_flipped[0]);
    CHECK(arr.constant_sign[3] == 1);
    CHECK(arr.planes[0].w.cwiseAbs().maxCoeff() == doctest::Approx(1.0));

    std::vector<Cell> cells;
    enumerate_cells(arr, fixtures::unit_cube(2), [&](const Cell& c) {
        cells.push_back(c);
        return true;
    });
    REQUIRE(cells.size() == 2);
    for (const auto& c : cells) {
        const double side = hs[0].w.dot(c.witness) - hs[0].b;
        CHECK(c.source_sign(arr, 0) * side > 0.0);
        CHECK(c.source_sign(arr, 1) * (hs[1].w.dot(c.witness) - hs[1].b) > 0.0);
    }
}

TEST_CASE("concurrent lines") {
    const std::vector<Hyperplane> hs{{vec({1.0, 0.0}), 0.0}, {vec({0.0, 1.0}), 0.0}, {vec({1.0, 1.0}), 0.0}};
    CHECK(enumerate_cells(hs, fixtures::unit_cube(2)).size() == 6);
}

TEST_CASE("early stop") {
    std::mt19937_64 rng(1);
    const auto lines = generic_lines(rng, 5);
    int seen = 0;
    enumerate_cells(normalize_hyperplanes(lines), fixtures::box({-100, -100}, {100, 100}).to_polytope(),
                    [&](const Cell&) { return ++seen < 3; });
    CHECK(seen == 3);
}

TEST_CASE("planar cell count matches the closed form and brute force") {
    std::mt19937_64 rng(2024);
    const HPolytope domain = fixtures::box({-100, -100}, {100, 100}).to_polytope();
    for (int K = 1; K <= 8; ++K) {
        const auto lines = generic_lines(rng, K);
        const auto cells = enumerate_cells(lines, domain);
        const std::size_t expected = static_cast<std::size_t>(1 + K + K * (K - 1) / 2);
        CHECK(cells.size() == expected);
        Matrix W(K, 2);
        Vector b(K);
        for (int k = 0; k < K; ++k) {
            W.row(k) = lines[static_cast<std::size_t>(k)].w;
            b(k) = lines[static_cast<std::size_t>(k)].b;
        }
        CHECK(oracle::brute_force_cell_count(W, b, domain, 1e-8) == expected);
    }
}

TEST_CASE("cells partition the domain") {
    std::mt19937_64 rng(77);
    const HPolytope domain = fixtures::box({-3, -3}, {3, 3}).to_polytope();
    const auto lines = generic_lines(rng, 7);
    const NormalizedArrangement arr = normalize_hyperplanes(lines);
    std::vector<Cell> cells;
    enumerate_cells(arr, domain, [&](const Cell& c) {
        cells.push_back(c);
        return true;
    });
    CHECK(cells.size() <= static_cast<std::size_t>(1 + 7 + 21));
    for (const auto& c : cells) {
        CHECK(c.region.max_violation(c.witness) <= -1e-8 + 1e-12);
        CHECK(domain.contains(c.witness, 0.0));
    }
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int unmatched = 0, multiple = 0;
    for (int k = 0; k < 10000; ++k) {
        const Vector x = vec({u(rng), u(rng)});
        bool near = false;
        const auto s = signs_at(arr, x, 1e-8, near);
        if (near) continue;
        int hits = 0;
        for (const auto& c : cells) hits += c.signs == s ? 1 : 0;
        unmatched += hits == 0;
        multiple += hits > 1;
    }
    CHECK(unmatched == 0);
    CHECK(multiple == 0);
}

TEST_CASE("infeasible domain yields nothing") {
    const HPolytope empty(mat({{1.0, 0.0}, {-1.0, 0.0}}), vec({-1.0, -1.0}));
    CHECK(enumerate_cells(std::vector<Hyperplane>{{vec({1.0, 0.0}), 0.0}}, empty).empty());
}

TEST_CASE("active function examples") {
    const TLLController absx({fixtures::abs_tll()});
    CHECK(active_function(absx, vec({-4})) == std::vector<int>{1});
    CHECK(active_function(absx, vec({4})) == std::vector<int>{0});
    const TLLController single({fixtures::first_coordinate(2)});
    CHECK(active_function(single, vec({0.3, -7.0})) == std::vector<int>{0});
    CHECK(pairwise_difference_hyperplanes(single).empty());
    CHECK(pairwise_difference_hyperplanes(absx).size() == 1);
}

TEST_CASE("active function is affine on each cell") {
    const TLLController ctrl = random_controller(2, 2, 5, 4, 31);
    const HPolytope domain = fixtures::box({-2, -2}, {2, 2}).to_polytope();
    const auto cells = enumerate_cells(pairwise_difference_hyperplanes(ctrl), domain);
    CHECK(cells.size() > 1);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (const auto& cell : cells) {
        const auto active = active_function(ctrl, cell.witness);
        for (int k = 0; k < 100; ++k) {
            const Vector x = cell.witness + 0.9 * cell.radius * vec({g(rng), g(rng)}).normalized();
            const Vector u = ctrl.eval(x);
            for (Eigen::Index out = 0; out < 2; ++out) {
                CHECK(std::abs(ctrl.component(out).local(active[static_cast<std::size_t>(out)], x) - u(out)) <= 1e-9);
            }
        }
    }
}
