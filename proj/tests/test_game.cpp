#include <doctest.h>

#include <cmath>

#include "secoord/game.hpp"
#include "secoord/rng.hpp"

using namespace secoord;

TEST_CASE("one column picks the max row") {
    GameSolution s = solve_zero_sum({{0.2}, {0.9}, {0.4}});
    CHECK(s.value == doctest::Approx(0.9));
    CHECK(s.row_mix[1] == doctest::Approx(1.0));
}

TEST_CASE("matching pennies") {
    GameSolution s = solve_zero_sum({{1.0, 0.0}, {0.0, 1.0}});
    CHECK(s.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.row_mix[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("dominated rows do not matter") {
    GameSolution s = solve_zero_sum({{1.0, 0.0}, {0.0, 1.0}, {-5.0, -5.0}});
    CHECK(s.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.row_mix[2] == doctest::Approx(0.0));
}

TEST_CASE("three columns solved by the LP path") {
    // rock-paper-scissors: value 0, uniform mixes
    GameSolution s = solve_zero_sum({{0.0, 1.0, -1.0}, {-1.0, 0.0, 1.0}, {1.0, -1.0, 0.0}});
    CHECK(s.value == doctest::Approx(0.0).epsilon(1e-9));
    for (double v : s.row_mix) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("LP and two-column closed form agree on random games") {
    Substream rng = derive_stream(77, {0});
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t rows = 2 + rng.uniform_index(6);
        std::vector<std::vector<double>> m2(rows, std::vector<double>(2));
        std::vector<std::vector<double>> m3(rows, std::vector<double>(3));
        for (std::size_t r = 0; r < rows; ++r) {
            m2[r][0] = rng.uniform01() * 4 - 2;
            m2[r][1] = rng.uniform01() * 4 - 2;
            // third column dominated by a large constant: same value
            m3[r][0] = m2[r][0];
            m3[r][1] = m2[r][1];
            m3[r][2] = 10.0;
        }
        GameSolution a = solve_zero_sum(m2);
        GameSolution b = solve_zero_sum(m3);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
        // the reported mix achieves the value
        double worst = 1e18;
        for (std::size_t z = 0; z < 2; ++z) {
            double v = 0.0;
            for (std::size_t r = 0; r < rows; ++r) v += a.row_mix[r] * m2[r][z];
            worst = std::min(worst, v);
        }
        CHECK(worst == doctest::Approx(a.value).epsilon(1e-9));
    }
}

TEST_CASE("value sits between pure-strategy bounds") {
    Substream rng = derive_stream(77, {1});
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t rows = 2 + rng.uniform_index(4);
        std::size_t cols = 3 + rng.uniform_index(3);
        std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
        for (auto& r : m)
            for (double& v : r) v = rng.uniform01() * 10 - 5;
        GameSolution s = solve_zero_sum(m);
        double maximin = -1e18, minimax = 1e18;
        for (std::size_t r = 0; r < rows; ++r) {
            double mn = 1e18;
            for (std::size_t c = 0; c < cols; ++c) mn = std::min(mn, m[r][c]);
            maximin = std::max(maximin, mn);
        }
        for (std::size_t c = 0; c < cols; ++c) {
            double mx = -1e18;
            for (std::size_t r = 0; r < rows; ++r) mx = std::max(mx, m[r][c]);
            minimax = std::min(minimax, mx);
        }
        CHECK(s.value >= maximin - 1e-9);
        CHECK(s.value <= minimax + 1e-9);
        // row mix guarantees the value against every column
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            for (std::size_t r = 0; r < rows; ++r) v += s.row_mix[r] * m[r][c];
            CHECK(v >= s.value - 1e-8);
        }
    }
}
