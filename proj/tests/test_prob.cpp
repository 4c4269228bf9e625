#include <doctest.h>

#include <cmath>

#include "secoord/prob.hpp"
#include "secoord/rng.hpp"

using namespace secoord;

namespace {

Alphabet bit(const char* name) { return Alphabet{name, {"0", "1"}}; }

JointDist random_joint(std::vector<Alphabet> axes, Substream& rng) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    std::vector<double> t(n);
    double total = 0.0;
    for (double& v : t) {
        v = -std::log(rng.uniform01() + 1e-300);
        total += v;
    }
    for (double& v : t) v /= total;
    return JointDist(std::move(axes), std::move(t));
}

} // namespace

TEST_CASE("marginal basics") {
    JointDist j({bit("X"), bit("Y")}, {0.4, 0.1, 0.2, 0.3});

    SUBCASE("identity when keeping all axes") {
        JointDist m = marginal(j, {"X", "Y"});
        for (std::size_t i = 0; i < j.size(); ++i)
            CHECK(m.table()[i] == doctest::Approx(j.table()[i]).epsilon(1e-15));
    }
    SUBCASE("uniform product marginalizes to Bern(1/2)") {
        JointDist u = JointDist::uniform({bit("X"), bit("Y")});
        JointDist m = marginal(u, {"X"});
        CHECK(m.table()[0] == doctest::Approx(0.5));
        CHECK(m.table()[1] == doctest::Approx(0.5));
    }
    SUBCASE("column sums") {
        JointDist m = marginal(j, {"X"});
        CHECK(m.table()[0] == doctest::Approx(0.5));
        CHECK(m.table()[1] == doctest::Approx(0.5));
    }
    SUBCASE("unknown axis is a configuration error") {
        CHECK_THROWS_AS(marginal(j, {"Q"}), config_error);
    }
}

TEST_CASE("conditional basics") {
    SUBCASE("deterministic copy gives the identity channel") {
        JointDist j({bit("X"), bit("Y")}, {0.5, 0.0, 0.0, 0.5});
        Channel ch = conditional(j, {"Y"}, {"X"});
        CHECK(ch.entry(0, 0) == doctest::Approx(1.0));
        CHECK(ch.entry(0, 1) == doctest::Approx(0.0));
        CHECK(ch.entry(1, 1) == doctest::Approx(1.0));
    }
    SUBCASE("independence gives constant rows") {
        JointDist j({bit("X"), bit("Y")}, {0.21, 0.09, 0.49, 0.21});
        Channel ch = conditional(j, {"Y"}, {"X"});
        CHECK(ch.entry(0, 0) == doctest::Approx(0.7));
        CHECK(ch.entry(1, 0) == doctest::Approx(0.7));
    }
    SUBCASE("zero-probability row becomes uniform") {
        JointDist j({bit("X"), bit("Y")}, {0.6, 0.4, 0.0, 0.0});
        Channel ch = conditional(j, {"Y"}, {"X"});
        CHECK(ch.entry(1, 0) == doctest::Approx(0.5));
        CHECK(ch.entry(1, 1) == doctest::Approx(0.5));
    }
    SUBCASE("overlapping sets rejected") {
        JointDist j({bit("X"), bit("Y")}, {0.25, 0.25, 0.25, 0.25});
        CHECK_THROWS_AS(conditional(j, {"X"}, {"X"}), config_error);
    }
}

TEST_CASE("information measures") {
    SUBCASE("fair bit has one bit of entropy") {
        JointDist j = JointDist::pmf(bit("X"), {0.5, 0.5});
        CHECK(entropy(j, {"X"}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("copy chains carry full mutual information") {
        JointDist j({bit("X"), bit("Y")}, {0.5, 0.0, 0.0, 0.5});
        CHECK(mutual_info(j, {"X"}, {"Y"}) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("independent variables share none") {
        JointDist j = JointDist::uniform({bit("X"), bit("Y")});
        CHECK(mutual_info(j, {"X"}, {"Y"}) == doctest::Approx(0.0));
    }
    SUBCASE("binary symmetric channel at flip 0.25") {
        // oracle: direct summation over the 4-entry joint
        JointDist j = compose(JointDist::pmf(bit("X"), {0.5, 0.5}),
                              Channel::binary_symmetric(bit("X"), "Y", 0.25));
        double oracle = 0.0;
        {
            JointDist mx = marginal(j, {"X"});
            JointDist my = marginal(j, {"Y"});
            std::size_t i = 0;
            for (std::size_t x = 0; x < 2; ++x)
                for (std::size_t y = 0; y < 2; ++y, ++i) {
                    double p = j.table()[i];
                    oracle += p * std::log2(p / (mx.table()[x] * my.table()[y]));
                }
        }
        CHECK(oracle == doctest::Approx(1.0 - binary_entropy(0.25)).epsilon(1e-12));
        CHECK(mutual_info(j, {"X"}, {"Y"}) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    // direct formula evaluation
    CHECK(binary_entropy(0.25) ==
          doctest::Approx(-0.25 * std::log2(0.25) - 0.75 * std::log2(0.75)).epsilon(1e-15));
    CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.1), config_error);
    CHECK_THROWS_AS(binary_entropy(1.1), config_error);
}

TEST_CASE("total variation") {
    JointDist p = JointDist::pmf(bit("X"), {0.5, 0.5});
    JointDist q = JointDist::pmf(bit("X"), {0.0, 1.0});
    JointDist r = JointDist::pmf(bit("X"), {0.25, 0.75});
    CHECK(total_variation(p, p) == 0.0);
    CHECK(total_variation(p, q) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(total_variation(p, r) == doctest::Approx(0.25).epsilon(1e-15));
    JointDist other = JointDist::pmf(bit("Y"), {0.5, 0.5});
    CHECK_THROWS_AS(total_variation(p, other), config_error);
}

TEST_CASE("markov checks") {
    SUBCASE("products are markov in any order") {
        JointDist j = JointDist::uniform({bit("A"), bit("B"), bit("C")});
        CHECK(is_markov(j, {"A"}, {"B"}, {"C"}, 1e-12));
        CHECK(is_markov(j, {"B"}, {"A"}, {"C"}, 1e-12));
        CHECK(is_markov(j, {"C"}, {"B"}, {"A"}, 1e-12));
    }
    SUBCASE("correlated endpoints with constant middle fail") {
        // A = C uniform bit, B constant
        Alphabet b1{"B", {"0"}};
        JointDist j({bit("A"), b1, bit("C")}, {0.5, 0.0, 0.0, 0.5});
        CHECK_FALSE(is_markov(j, {"A"}, {"B"}, {"C"}, 1e-9));
    }
    SUBCASE("chains built by construction pass at 1e-12") {
        Substream rng = derive_stream(11, {0});
        for (int trial = 0; trial < 20; ++trial) {
            JointDist ab = random_joint({bit("A"), bit("B")}, rng);
            std::vector<double> rows;
            for (int r = 0; r < 2; ++r) {
                double u = rng.uniform01();
                rows.push_back(u);
                rows.push_back(1.0 - u);
            }
            JointDist j = compose(ab, Channel({bit("B")}, {bit("C")}, rows));
            CHECK(is_markov(j, {"A"}, {"B"}, {"C"}, 1e-12));
        }
    }
}

TEST_CASE("compose basics") {
    SUBCASE("identity channel duplicates the axis") {
        JointDist x = JointDist::pmf(bit("X"), {0.3, 0.7});
        JointDist j = compose(x, Channel::identity(bit("X"), "C"));
        CHECK(mutual_info(j, {"X"}, {"C"}) ==
              doctest::Approx(entropy(j, {"X"})).epsilon(1e-12));
    }
    SUBCASE("flip channel reproduces the BSC table") {
        JointDist x = JointDist::pmf(bit("X"), {0.5, 0.5});
        JointDist j = compose(x, Channel::binary_symmetric(bit("X"), "Y", 0.25));
        // canonical order (X, Y)
        CHECK(j.table()[0] == doctest::Approx(0.375));
        CHECK(j.table()[1] == doctest::Approx(0.125));
        CHECK(j.table()[2] == doctest::Approx(0.125));
        CHECK(j.table()[3] == doctest::Approx(0.375));
    }
    SUBCASE("axis collision rejected") {
        JointDist x = JointDist::pmf(bit("X"), {0.5, 0.5});
        CHECK_THROWS_AS(compose(x, Channel::identity(bit("X"), "X")), config_error);
    }
}

TEST_CASE("chain rule and information inequalities on random joints") {
    Substream rng = derive_stream(2024, {1});
    for (int trial = 0; trial < 60; ++trial) {
        Alphabet a{"A", {"0", "1", "2"}};
        JointDist j = random_joint({a, bit("B"), bit("C")}, rng);
        // chain rule
        CHECK(entropy(j, {"A", "B"}) ==
              doctest::Approx(entropy(j, {"A"}) + cond_entropy(j, {"B"}, {"A"})).epsilon(1e-9));
        // nonnegativity and caps
        double i_ab = mutual_info(j, {"A"}, {"B"});
        CHECK(i_ab >= 0.0);
        CHECK(i_ab <= std::min(entropy(j, {"A"}), entropy(j, {"B"})) + 1e-9);
        CHECK(cond_mutual_info(j, {"A"}, {"B"}, {"C"}) >= 0.0);
    }
}

TEST_CASE("total variation is a metric on random triples") {
    Substream rng = derive_stream(2024, {2});
    for (int trial = 0; trial < 40; ++trial) {
        Alphabet a{"A", {"0", "1", "2"}};
        JointDist p = random_joint({a, bit("B")}, rng);
        JointDist q = random_joint({a, bit("B")}, rng);
        JointDist r = random_joint({a, bit("B")}, rng);
        CHECK(total_variation(p, q) == doctest::Approx(total_variation(q, p)).epsilon(1e-12));
        CHECK(total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-12);
        CHECK(total_variation(p, q) >= 0.0);
        CHECK(total_variation(p, q) <= 1.0);
    }
}

TEST_CASE("compose then marginal is the identity") {
    Substream rng = derive_stream(2024, {3});
    for (int trial = 0; trial < 30; ++trial) {
        JointDist j = random_joint({bit("X"), bit("Y")}, rng);
        std::vector<double> rows;
        for (int r = 0; r < 4; ++r) {
            double u = rng.uniform01();
            rows.push_back(u);
            rows.push_back(1.0 - u);
        }
        JointDist big = compose(j, Channel({bit("X"), bit("Y")}, {bit("Z")}, rows));
        JointDist back = marginal(big, {"X", "Y"});
        for (std::size_t i = 0; i < j.size(); ++i)
            CHECK(std::abs(back.table()[i] - j.table()[i]) <= 1e-12);
    }
}

TEST_CASE("is_markov implies small conditional mutual information") {
    Substream rng = derive_stream(2024, {4});
    for (int trial = 0; trial < 20; ++trial) {
        JointDist ab = random_joint({bit("A"), bit("B")}, rng);
        std::vector<double> rows;
        for (int r = 0; r < 2; ++r) {
            double u = rng.uniform01();
            rows.push_back(u);
            rows.push_back(1.0 - u);
        }
        JointDist j = compose(ab, Channel({bit("B")}, {bit("C")}, rows));
        REQUIRE(is_markov(j, {"A"}, {"B"}, {"C"}, 1e-12));
        CHECK(cond_mutual_info(j, {"A"}, {"C"}, {"B"}) <= 8 * 1e-9);
    }
}

TEST_CASE("joint dist layout is canonical") {
    // the same data handed over in two axis orders lands in one layout
    JointDist a({bit("X"), bit("Y")}, {0.4, 0.1, 0.2, 0.3});
    JointDist b({bit("Y"), bit("X")}, {0.4, 0.2, 0.1, 0.3});
    REQUIRE(a.axes()[0].name == "X");
    REQUIRE(b.axes()[0].name == "X");
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.table()[i] == b.table()[i]);
}

TEST_CASE("invalid tables rejected") {
    CHECK_THROWS_AS(JointDist({bit("X")}, {0.5, 0.6}), config_error);
    CHECK_THROWS_AS(JointDist({bit("X")}, {-0.1, 1.1}), config_error);
    CHECK_THROWS_AS(JointDist({bit("X")}, {0.5, 0.5, 0.0}), config_error);
    CHECK_THROWS_AS(Channel({bit("X")}, {bit("Y")}, {0.5, 0.4, 0.5, 0.5}), config_error);
}
