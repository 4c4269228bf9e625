#include <doctest.h>

#include <cmath>

#include "secoord/adversary.hpp"
#include "secoord/rng.hpp"

using namespace secoord;

namespace {

SourceSpec hamming_source(double flip) {
    return SourceSpec::binary_symmetric(
        flip, {PayoffFn::hamming(Alphabet::indexed(kAxisX, 2), Alphabet::indexed(kAxisXhat, 2))});
}

SchemeDist preset(const SourceSpec& src, const char* name) {
    return build_scheme(src.source_joint(), presets::by_name(name, src));
}

} // namespace

TEST_CASE("single letter best response anchors") {
    SourceSpec src = hamming_source(0.0);

    SUBCASE("public carry lets the adversary match the source") {
        SchemeDist q = preset(src, "no_secrecy"); // U = X
        auto [strat, value] = single_letter_best_response(q, src.payoffs[0]);
        CHECK(value == doctest::Approx(0.0).epsilon(1e-12));
        // z(u, w) = u
        CHECK(strat.at(0, 0) == 0);
        CHECK(strat.at(1, 0) == 1);
    }
    SUBCASE("blind adversary guesses") {
        SchemeDist q = preset(src, "one_time_pad"); // U, W constant
        auto [strat, value] = single_letter_best_response(q, src.payoffs[0]);
        CHECK(value == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(strat.at(0, 0) == 0); // tie toward the lowest index
    }
    SUBCASE("three-symbol posterior plays the mode") {
        Alphabet x3{kAxisX, {"0", "1", "2"}};
        SourceSpec s3;
        s3.joint = compose(JointDist::pmf(x3, {0.5, 0.3, 0.2}),
                           Channel::identity(x3, kAxisY));
        s3.disclosure = Channel({x3}, {Alphabet{"Dx", {"-"}}}, {1, 1, 1});
        s3.payoffs = {PayoffFn::hamming(x3, Alphabet{kAxisXhat, x3.symbols})};
        SchemeDist q = preset(s3, "one_time_pad");
        auto [strat, value] = single_letter_best_response(q, s3.payoffs[0]);
        CHECK(strat.at(0, 0) == 0); // argmax posterior (0.5, 0.3, 0.2)
        CHECK(value == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("log loss best response is the posterior") {
    SourceSpec src = hamming_source(0.0);

    SUBCASE("carry scheme leaves nothing to learn") {
        SchemeDist q = preset(src, "no_secrecy");
        auto [strat, bits] = log_loss_best_response(q);
        CHECK(bits == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(strat.at(0, 0)[0] == doctest::Approx(1.0));
        CHECK(strat.at(1, 0)[1] == doctest::Approx(1.0));
    }
    SUBCASE("blind adversary keeps full uncertainty") {
        SchemeDist q = preset(src, "one_time_pad");
        auto [strat, bits] = log_loss_best_response(q);
        CHECK(bits == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(strat.at(0, 0)[0] == doctest::Approx(0.5));
    }
    SUBCASE("posterior beats every gridded belief on random schemes") {
        Substream rng = derive_stream(31, {0});
        SourceSpec src2 = hamming_source(0.2);
        for (int t = 0; t < 5; ++t) {
            SchemeDist q = random_factor_scheme(src2.source_joint(), SchemeSizes{}, rng);
            auto [strat, bits] = log_loss_best_response(q);
            CHECK(bits ==
                  doctest::Approx(cond_entropy(q.joint, {kAxisX}, {kAxisU, kAxisW}))
                      .epsilon(1e-9));
            // oracle: minimize the expected log score over beliefs on a 1/64
            // grid; nothing beats the posterior value
            JointDist m = marginal(q.joint, {kAxisX, kAxisU, kAxisW});
            const std::size_t nu = m.axis(kAxisU).size(), nw = m.axis(kAxisW).size();
            double best_grid = 0.0;
            std::vector<std::size_t> dg(3);
            for (std::size_t u = 0; u < nu; ++u)
                for (std::size_t w = 0; w < nw; ++w) {
                    double p0 = 0.0, p1 = 0.0;
                    for (std::size_t f = 0; f < m.size(); ++f) {
                        m.digits_of(f, dg); // canonical order (U, W, X)
                        if (dg[0] == u && dg[1] == w) (dg[2] == 0 ? p0 : p1) += m.table()[f];
                    }
                    double cell_best = 1e18;
                    for (int k = 0; k <= 64; ++k) {
                        double b0 = std::max(k / 64.0, 1e-12);
                        double b1 = std::max(1.0 - k / 64.0, 1e-12);
                        cell_best =
                            std::min(cell_best, -p0 * std::log2(b0) - p1 * std::log2(b1));
                    }
                    best_grid += cell_best;
                }
            CHECK(bits <= best_grid + 1e-9);
        }
    }
}

TEST_CASE("garbling the adversary's cells never hurts the system") {
    // merged-cell min >= sum of per-cell minima (coarser information helps)
    Substream rng = derive_stream(31, {1});
    SourceSpec src = hamming_source(0.2);
    for (int t = 0; t < 20; ++t) {
        SchemeDist q = random_factor_scheme(src.source_joint(), SchemeSizes{}, rng);
        JointDist m = marginal(q.joint, {kAxisX, kAxisXhat, kAxisU, kAxisW});
        const PayoffFn& pf = src.payoffs[0];
        const std::size_t nu = m.axis(kAxisU).size(), nw = m.axis(kAxisW).size();
        // cell sums s_{u,w}(z)
        std::vector<double> s(nu * nw * 2, 0.0);
        std::vector<std::size_t> dg(4);
        for (std::size_t f = 0; f < m.size(); ++f) {
            m.digits_of(f, dg); // canonical (U, W, X, Xhat)
            for (std::size_t z = 0; z < 2; ++z)
                s[(dg[0] * nw + dg[1]) * 2 + z] += m.table()[f] * pf.value(dg[2], dg[3], z);
        }
        // merge the two u-cells at w = 0
        double split = std::min(s[0], s[1]) + std::min(s[nw * 2 + 0], s[nw * 2 + 1]);
        double merged = std::min(s[0] + s[nw * 2 + 0], s[1] + s[nw * 2 + 1]);
        CHECK(merged >= split - 1e-12);
    }
}

TEST_CASE("bayesian adversary") {
    SourceSpec src = hamming_source(0.0);

    SUBCASE("no key uncertainty reduces to the single-letter play") {
        // V constant, so knowing the v-word adds nothing over (u, w)
        SchemeDist q = preset(src, "no_secrecy");
        Rates rates{0.0, 1.0, 0.0};
        Codebook c(q, 3, rates, 99);
        SchemeChannels ch(q);
        auto [sl, value] = single_letter_best_response(q, src.payoffs[0]);

        BayesianAdversaryState st = bayesian_begin(c, ch, 0, 1, true, 1 << 20);
        for (std::size_t i = 1; i <= 3; ++i) {
            std::optional<std::size_t> prev;
            if (i > 1) prev = std::size_t{0};
            auto [action, next] = bayesian_step(st, prev, src.payoffs[0]);
            CHECK(action.z == sl.at(c.u_symbol(0, 1, i - 1), c.w_symbol(0, i - 1)));
            st = std::move(next);
        }
        (void)value;
    }

    SUBCASE("uninformative disclosure never moves the posterior") {
        // X carried on U, V independent: Q_{X|UVW} = Q_{X|UW}, so disclosed
        // past symbols say nothing about the key
        SchemeDist q = preset(src, "no_secrecy");
        Rates rates{0.0, 1.0, 1.0};
        Codebook c(q, 4, rates, 99);
        SchemeChannels ch(q);
        BayesianAdversaryState st = bayesian_begin(c, ch, 0, 2, true, 1 << 20);
        for (std::size_t i = 1; i <= 4; ++i) {
            std::optional<std::size_t> prev;
            if (i > 1) prev = std::size_t{i % 2};
            auto [action, next] = bayesian_step(st, prev, src.payoffs[0]);
            st = std::move(next);
            double total = 0.0;
            for (double p : st.posterior) {
                CHECK(p == doctest::Approx(1.0 / st.posterior.size()).epsilon(1e-12));
                total += p;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("posterior matches an independent Bayes computation") {
        SourceSpec psrc = hamming_source(0.0);
        SchemeDist q = preset(psrc, "one_time_pad"); // V = X
        Rates rates{0.0, 0.5, 0.5};
        Codebook c(q, 2, rates, 123);
        SchemeChannels ch(q);
        REQUIRE(c.num_keys() == 2);

        const std::size_t mh = 0, m = 0;
        BayesianAdversaryState st = bayesian_begin(c, ch, mh, m, true, 1 << 20);
        // disclose something consistent with at least one key hypothesis
        const std::size_t disclosed = c.v_symbol(mh, m, 0, 0);
        auto [a1, st1] = bayesian_step(st, std::nullopt, psrc.payoffs[0]);
        auto [a2, st2] = bayesian_step(st1, disclosed, psrc.payoffs[0]);

        // oracle: direct Bayes over the idealized symbol channel
        std::vector<double> post(c.num_keys(), 1.0 / static_cast<double>(c.num_keys()));
        double total = 0.0;
        for (std::size_t k = 0; k < c.num_keys(); ++k) {
            std::size_t row = ch.uvw(c.u_symbol(mh, m, 0), c.v_symbol(mh, m, k, 0),
                                     c.w_symbol(mh, 0));
            post[k] *= ch.d_given_uvw[row * ch.nd + disclosed];
            total += post[k];
        }
        REQUIRE(total > 0.0);
        for (double& p : post) p /= total;
        for (std::size_t k = 0; k < c.num_keys(); ++k)
            CHECK(st2.posterior[k] == doctest::Approx(post[k]).epsilon(1e-12));

        double mass = 0.0;
        for (double p : st2.posterior) {
            CHECK(p >= 0.0);
            mass += p;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("known v-word play never beats the single-letter ceiling") {
        SourceSpec psrc = hamming_source(0.0);
        SchemeDist q = preset(psrc, "one_time_pad");
        Rates rates{0.0, 1.0, 0.0}; // no key: the adversary knows the v-word
        Codebook c(q, 2, rates, 5);
        SchemeChannels ch(q);
        auto [sl, sl_value] = single_letter_best_response(q, psrc.payoffs[0]);
        CHECK(sl_value == doctest::Approx(0.5).epsilon(1e-12));

        BayesianAdversaryState st = bayesian_begin(c, ch, 0, 1, true, 1 << 20);
        auto [action, next] = bayesian_step(st, std::nullopt, psrc.payoffs[0]);
        std::size_t row = ch.uvw(c.u_symbol(0, 1, 0), c.v_symbol(0, 1, 0, 0), c.w_symbol(0, 0));
        double exp_payoff = 0.0;
        for (std::size_t x = 0; x < 2; ++x)
            exp_payoff +=
                ch.x_given_uvw[row * ch.nx + x] * psrc.payoffs[0].value(x, 0, action.z);
        CHECK(exp_payoff <= sl_value + 1e-9);
        (void)next;
    }

    SUBCASE("posterior budget produces a resource error") {
        SchemeDist q = preset(src, "one_time_pad");
        Rates rates{0.0, 1.0, 1.0};
        Codebook c(q, 8, rates, 7);
        SchemeChannels ch(q);
        CHECK_THROWS_AS(bayesian_begin(c, ch, 0, 0, true, 10), resource_error);
    }
}

TEST_CASE("strategy tables are fully populated") {
    SourceSpec src = hamming_source(0.0);
    SchemeDist q = preset(src, "no_secrecy");
    auto [strat, value] = single_letter_best_response(q, src.payoffs[0]);
    CHECK(strat.z.size() == strat.nu * strat.nw);
    auto [beliefs, bits] = log_loss_best_response(q);
    CHECK(beliefs.beliefs.size() == beliefs.nu * beliefs.nw * beliefs.nx);
    (void)value;
    (void)bits;
}
