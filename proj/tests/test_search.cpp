#include <doctest.h>

#include <cmath>

#include "secoord/region.hpp"

using namespace secoord;

namespace {

SourceSpec lossless_source(double flip) {
    return SourceSpec::binary_symmetric(
        flip, {PayoffFn::lossless_hamming(Alphabet::indexed(kAxisX, 2),
                                          Alphabet::indexed(kAxisXhat, 2))});
}

SearchConfig quick_ca(std::uint64_t seed) {
    SearchConfig cfg;
    cfg.engine = SearchConfig::Engine::coordinate_ascent;
    cfg.cap_w = 2;
    cfg.cap_u = 2;
    cfg.cap_v = 2;
    cfg.restarts = 8;
    cfg.max_iters = 30;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("unbounded budget reaches the blind-adversary payoff") {
    SourceSpec src = lossless_source(0.0);
    SearchResult r = best_payoff(src, RateBudget{}, 0, quick_ca(42));
    CHECK(r.budget_feasible);
    CHECK(r.payoff_value == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(validate_scheme(r.scheme, src, 1e-6).empty());
}

TEST_CASE("no key and no helper forces a revealed carry") {
    SourceSpec src = lossless_source(0.0);
    RateBudget b;
    b.helper_rate = 0.0;
    b.key_rate = 0.0; // msg rate unbounded
    SearchResult r = best_payoff(src, b, 0, quick_ca(43));
    CHECK(r.budget_feasible);
    CHECK(std::abs(r.payoff_value) <= 1e-9);
    // oracle confirms: grid search over the same caps
    SearchConfig g = quick_ca(43);
    g.engine = SearchConfig::Engine::grid;
    g.grid_resolution = 4;
    SearchResult gr = best_payoff(src, b, 0, g);
    CHECK(gr.budget_feasible);
    CHECK(std::abs(gr.payoff_value) <= 1e-9);
}

TEST_CASE("zero budget returns the best constant play") {
    // plain Hamming: silence against a blind adversary is optimal
    SourceSpec src = SourceSpec::binary_symmetric(
        0.0, {PayoffFn::hamming(Alphabet::indexed(kAxisX, 2), Alphabet::indexed(kAxisXhat, 2))});
    RateBudget b;
    b.helper_rate = 0.0;
    b.msg_rate = 0.0;
    b.key_rate = 0.0;
    SearchResult r = best_payoff(src, b, 0, quick_ca(44));
    CHECK(r.payoff_value == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.point.helper_rate <= 1e-9);
    CHECK(r.point.msg_rate <= 1e-9);
    CHECK(r.point.key_rate <= 1e-9);
}

TEST_CASE("coordinate ascent beats the grid oracle on a small lattice") {
    SourceSpec src = lossless_source(0.1);
    std::vector<RateBudget> budgets;
    for (double rr : {1.0, 1.2})
        for (double k : {0.0, 0.5, 1.0}) {
            RateBudget b;
            b.helper_rate = 0.25;
            b.msg_rate = rr;
            b.key_rate = k;
            budgets.push_back(b);
        }

    SearchConfig g = quick_ca(45);
    g.engine = SearchConfig::Engine::grid;
    g.grid_resolution = 8;
    auto grid = best_payoff_lattice(src, budgets, 0, g);

    auto ca = best_payoff_lattice(src, budgets, 0, quick_ca(45));
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        INFO("budget ", i, " grid=", grid[i].payoff_value, " ca=", ca[i].payoff_value);
        CHECK(ca[i].payoff_value >= grid[i].payoff_value - 1e-3);
        if (grid[i].budget_feasible) CHECK(budgets[i].admits(grid[i].point));
        if (ca[i].budget_feasible) CHECK(budgets[i].admits(ca[i].point));
    }
}

TEST_CASE("best payoff is monotone in the budget") {
    SourceSpec src = lossless_source(0.1);
    std::vector<RateBudget> budgets;
    std::vector<double> hs{0.0, 0.5}, rs{1.0, 1.3}, ks{0.0, 1.0};
    for (double h : hs)
        for (double r : rs)
            for (double k : ks) {
                RateBudget b;
                b.helper_rate = h;
                b.msg_rate = r;
                b.key_rate = k;
                budgets.push_back(b);
            }
    auto res = best_payoff_lattice(src, budgets, 0, quick_ca(46));
    auto value = [&](std::size_t h, std::size_t r, std::size_t k) {
        return res[(h * rs.size() + r) * ks.size() + k].payoff_value;
    };
    for (std::size_t h = 0; h < hs.size(); ++h)
        for (std::size_t r = 0; r < rs.size(); ++r)
            for (std::size_t k = 0; k < ks.size(); ++k) {
                if (h + 1 < hs.size()) CHECK(value(h + 1, r, k) >= value(h, r, k) - 1e-9);
                if (r + 1 < rs.size()) CHECK(value(h, r + 1, k) >= value(h, r, k) - 1e-9);
                if (k + 1 < ks.size()) CHECK(value(h, r, k + 1) >= value(h, r, k) - 1e-9);
            }
}

TEST_CASE("grid search is deterministic") {
    SourceSpec src = lossless_source(0.1);
    RateBudget b;
    b.helper_rate = 0.5;
    b.msg_rate = 1.0;
    b.key_rate = 0.5;
    SearchConfig g = quick_ca(47);
    g.engine = SearchConfig::Engine::grid;
    g.grid_resolution = 6;
    SearchResult a = best_payoff(src, b, 0, g);
    SearchResult c = best_payoff(src, b, 0, g);
    CHECK(a.payoff_value == c.payoff_value);
    CHECK(a.point.msg_rate == c.point.msg_rate);
    for (std::size_t i = 0; i < a.scheme.joint.size(); ++i)
        CHECK(a.scheme.joint.table()[i] == c.scheme.joint.table()[i]);
}

TEST_CASE("search caps are validated") {
    SourceSpec src = lossless_source(0.1);
    SearchConfig cfg = quick_ca(48);
    cfg.cap_w = 0;
    CHECK_THROWS_AS(best_payoff(src, RateBudget{}, 0, cfg), config_error);
    cfg = quick_ca(48);
    cfg.engine = SearchConfig::Engine::grid;
    cfg.grid_resolution = 1;
    CHECK_THROWS_AS(best_payoff(src, RateBudget{}, 0, cfg), config_error);
}
