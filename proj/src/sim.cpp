#include "secoord/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace secoord {

namespace {

constexpr double kBeliefFloor = 1e-12; // clamp for log-loss payoffs

double belief_payoff(std::span<const double> belief, std::size_t x) {
    return -std::log2(std::max(belief[x], kBeliefFloor));
}

} // namespace

EpisodeTrace run_episode(const SourceSpec& src, const Codebook& c, const SchemeChannels& ch,
                         AdversaryBase& adversary, const std::vector<PayoffFn>& payoffs,
                         std::uint64_t master_seed, std::uint64_t episode_index) {
    const std::size_t n = c.n();
    EpisodeTrace tr;
    tr.x.resize(n);
    tr.y.resize(n);
    tr.d.resize(n);

    JointDist dxy = src.source_joint();
    const std::size_t pd = dxy.axis_pos(kAxisD);
    const std::size_t px = dxy.axis_pos(kAxisX);
    const std::size_t py = dxy.axis_pos(kAxisY);

    Substream source_rng = derive_stream(master_seed, Role::Source, episode_index);
    std::vector<std::size_t> digits(3);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t f = source_rng.categorical(dxy.table());
        dxy.digits_of(f, digits);
        tr.d[i] = digits[pd];
        tr.x[i] = digits[px];
        tr.y[i] = digits[py];
    }

    Substream key_rng = derive_stream(master_seed, Role::Key, episode_index);
    tr.k = key_rng.uniform_index(c.num_keys());

    Substream helper_rng = derive_stream(master_seed, Role::Helper, episode_index);
    tr.m_h = helper_encode(tr.y, c, ch, helper_rng);

    Substream alice_rng = derive_stream(master_seed, Role::Alice, episode_index);
    tr.m = alice_encode(tr.x, tr.m_h, tr.k, c, ch, alice_rng);

    Substream bob_rng = derive_stream(master_seed, Role::Bob, episode_index);
    tr.xhat = bob_decode(tr.m_h, tr.m, tr.k, c, ch, bob_rng);

    adversary.begin_episode(c, tr.m_h, tr.m);
    tr.z.assign(n, 0);
    tr.symbol_payoffs.assign(payoffs.size(), std::vector<double>(n, 0.0));
    bool any_belief = false;
    for (const auto& p : payoffs) any_belief |= p.log_loss;
    if (any_belief) tr.z_beliefs.resize(n);

    for (std::size_t i = 1; i <= n; ++i) {
        std::optional<std::size_t> prev;
        if (i > 1) prev = tr.d[i - 2];
        AdversaryAction a = adversary.step(i, prev);
        tr.z[i - 1] = a.z;
        if (!a.belief.empty()) tr.z_beliefs[i - 1] = a.belief;
        for (std::size_t pi = 0; pi < payoffs.size(); ++pi) {
            const PayoffFn& pf = payoffs[pi];
            double v;
            if (pf.log_loss) {
                if (a.belief.empty())
                    throw config_error("log-loss payoff needs a belief-valued adversary");
                v = belief_payoff(a.belief, tr.x[i - 1]);
            } else {
                v = pf.value(tr.x[i - 1], tr.xhat[i - 1], a.z);
            }
            tr.symbol_payoffs[pi][i - 1] = v;
        }
    }
    tr.block_payoffs.resize(payoffs.size());
    for (std::size_t pi = 0; pi < payoffs.size(); ++pi) {
        double s = 0.0;
        for (double v : tr.symbol_payoffs[pi]) s += v;
        tr.block_payoffs[pi] = s / static_cast<double>(n);
    }
    return tr;
}

namespace {

struct Moments {
    double mean = 0.0, stderr_ = 0.0;
};

Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double v : xs) s += v;
    m.mean = s / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double v : xs) ss += (v - m.mean) * (v - m.mean);
        m.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return m;
}

} // namespace

namespace {

SimReport monte_carlo_impl(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                           Rates rates, const std::vector<std::string>& adversary_types,
                           std::size_t episodes, std::uint64_t seed, const SimBudgets& budgets,
                           bool with_tv, std::size_t tv_codebooks, bool parallel);

} // namespace

SimReport monte_carlo(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                      Rates rates, const std::vector<std::string>& adversary_types,
                      std::size_t episodes, std::uint64_t seed, const SimBudgets& budgets,
                      bool with_tv, std::size_t tv_codebooks) {
    return monte_carlo_impl(src, scheme, n, rates, adversary_types, episodes, seed, budgets,
                            with_tv, tv_codebooks, true);
}

SimReport monte_carlo_serial(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                             Rates rates, const std::vector<std::string>& adversary_types,
                             std::size_t episodes, std::uint64_t seed, const SimBudgets& budgets,
                             bool with_tv, std::size_t tv_codebooks) {
    return monte_carlo_impl(src, scheme, n, rates, adversary_types, episodes, seed, budgets,
                            with_tv, tv_codebooks, false);
}

namespace {

SimReport monte_carlo_impl(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                           Rates rates, const std::vector<std::string>& adversary_types,
                           std::size_t episodes, std::uint64_t seed, const SimBudgets& budgets,
                           bool with_tv, std::size_t tv_codebooks, bool parallel) {
    if (episodes < 1) throw config_error("episodes must be >= 1");
    if (adversary_types.empty()) throw config_error("at least one adversary type required");

    Codebook codebook(scheme, n, rates, seed, budgets.codebook_symbols);
    SchemeChannels channels(scheme);

    SimReport report;
    report.n = n;
    report.rates = rates;
    report.episodes = episodes;
    report.seed = seed;

    const auto& payoffs = src.payoffs;
    if (payoffs.empty()) throw config_error("source has no payoff functions");

    for (const auto& type : adversary_types) {
        // Episode 0 dry run catches budget/config errors before the parallel
        // region; the adversary's objective is the first payoff.
        {
            auto probe = make_adversary(type, scheme, payoffs[0], budgets.posterior_states);
            run_episode(src, codebook, channels, *probe, payoffs, seed, 0);
        }

        // per-episode results gathered first, reduced serially afterwards so
        // thread count cannot affect the report
        std::vector<std::vector<double>> block(payoffs.size(),
                                               std::vector<double>(episodes, 0.0));
        std::vector<std::vector<double>> min_symbol(payoffs.size(),
                                                    std::vector<double>(episodes, 0.0));
        std::vector<std::vector<std::vector<double>>> profile(
            payoffs.size(), std::vector<std::vector<double>>(n, std::vector<double>(episodes)));

        auto record = [&](AdversaryBase& adversary, long long e) {
            EpisodeTrace tr = run_episode(src, codebook, channels, adversary, payoffs, seed,
                                          static_cast<std::uint64_t>(e));
            for (std::size_t pi = 0; pi < payoffs.size(); ++pi) {
                block[pi][e] = tr.block_payoffs[pi];
                double mn = tr.symbol_payoffs[pi][0];
                for (double v : tr.symbol_payoffs[pi]) mn = std::min(mn, v);
                min_symbol[pi][e] = mn;
                for (std::size_t i = 0; i < n; ++i) profile[pi][i][e] = tr.symbol_payoffs[pi][i];
            }
        };

        if (!parallel) {
            // serial reference path
            auto adversary = make_adversary(type, scheme, payoffs[0], budgets.posterior_states);
            for (long long e = 0; e < static_cast<long long>(episodes); ++e)
                record(*adversary, e);
        } else {
            std::exception_ptr failure = nullptr;
#ifdef _OPENMP
#pragma omp parallel
#endif
            {
                auto adversary =
                    make_adversary(type, scheme, payoffs[0], budgets.posterior_states);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
                for (long long e = 0; e < static_cast<long long>(episodes); ++e) {
                    try {
                        record(*adversary, e);
                    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                        {
                            if (!failure) failure = std::current_exception();
                        }
                    }
                }
            }
            if (failure) std::rethrow_exception(failure);
        }

        AdversaryReport ar;
        ar.name = type;
        for (std::size_t pi = 0; pi < payoffs.size(); ++pi) {
            Moments m = moments_of(block[pi]);
            ar.payoff_mean.push_back(m.mean);
            ar.payoff_stderr.push_back(m.stderr_);
            ar.min_symbol_payoff_mean.push_back(moments_of(min_symbol[pi]).mean);
            std::vector<double> pm(n), ps(n);
            for (std::size_t i = 0; i < n; ++i) {
                Moments mi = moments_of(profile[pi][i]);
                pm[i] = mi.mean;
                ps[i] = mi.stderr_;
            }
            ar.profile_mean.push_back(std::move(pm));
            ar.profile_stderr.push_back(std::move(ps));
        }
        if (type == "single_letter" && !payoffs[0].log_loss)
            ar.strategy = single_letter_best_response(scheme, payoffs[0]).first;
        report.adversaries.push_back(std::move(ar));
    }

    if (with_tv) {
        auto [mean_tv, per_cb] =
            exact_induced_tv(src, scheme, n, rates, tv_codebooks, seed, budgets);
        report.tv = TvDiagnostics{mean_tv, std::move(per_cb)};
    }
    return report;
}

} // namespace

double exact_induced_tv_for_codebook(const SourceSpec& src, const Codebook& c,
                                     const SimBudgets& budgets) {
    const SchemeDist& scheme = c.scheme();
    SchemeChannels ch(scheme);
    const std::size_t n = c.n();

    JointDist dxy = src.source_joint();
    const std::size_t pd = dxy.axis_pos(kAxisD);
    const std::size_t px = dxy.axis_pos(kAxisX);
    const std::size_t py = dxy.axis_pos(kAxisY);
    const std::size_t nx = ch.nx, ny = ch.ny;

    // P_{XY} per symbol (D summed out) and Q_{XY|UVW} per symbol.
    std::vector<double> pxy(nx * ny, 0.0);
    {
        std::vector<std::size_t> digits(3);
        for (std::size_t f = 0; f < dxy.size(); ++f) {
            dxy.digits_of(f, digits);
            pxy[digits[px] * ny + digits[py]] += dxy.table()[f];
        }
    }
    JointDist m5 = marginal(scheme.joint, {kAxisX, kAxisY, kAxisU, kAxisV, kAxisW});
    Channel xy_given_uvw = conditional(m5, {kAxisX, kAxisY}, {kAxisU, kAxisV, kAxisW});

    std::size_t xyn = 1;
    for (std::size_t i = 0; i < n; ++i) {
        xyn *= nx * ny;
        if (xyn > budgets.enumeration) break;
    }
    const std::size_t mh_n = c.num_helper_msgs(), m_n = c.num_msgs(), k_n = c.num_keys();
    const double cost = static_cast<double>(xyn) * static_cast<double>(mh_n * m_n * k_n);
    if (xyn > budgets.enumeration || cost > static_cast<double>(budgets.enumeration)) {
        std::ostringstream os;
        os << "exact TV enumeration needs ~" << cost << " terms, budget " << budgets.enumeration;
        throw resource_error(os.str());
    }

    // decode flat (x^n, y^n) indices: digit j of base nx*ny
    auto xy_at = [&](std::size_t flat, std::size_t i) {
        for (std::size_t j = n; j-- > i + 1;) flat /= (nx * ny);
        return flat % (nx * ny);
    };

    // Helper-encoder pmf per y^n over m_h, and source probability tables.
    std::size_t y_count = 1, x_count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        y_count *= ny;
        x_count *= nx;
    }
    auto y_digit = [&](std::size_t flat, std::size_t i) {
        for (std::size_t j = n; j-- > i + 1;) flat /= ny;
        return flat % ny;
    };
    auto x_digit = [&](std::size_t flat, std::size_t i) {
        for (std::size_t j = n; j-- > i + 1;) flat /= nx;
        return flat % nx;
    };

    std::vector<std::vector<double>> helper_pmf(y_count);
    std::vector<std::size_t> yseq(n);
    for (std::size_t yf = 0; yf < y_count; ++yf) {
        for (std::size_t i = 0; i < n; ++i) yseq[i] = y_digit(yf, i);
        helper_pmf[yf] = helper_encode_pmf(yseq, c, ch);
    }

    // Aggregate over index triples mapping to identical codeword sequences.
    std::map<std::array<std::uint64_t, 3>, std::pair<std::vector<double>, std::vector<double>>>
        cells; // key -> (operational, idealized) over (x^n, y^n)

    std::vector<std::size_t> xseq(n);
    const double p_triple = 1.0 / (static_cast<double>(mh_n) * static_cast<double>(m_n) *
                                   static_cast<double>(k_n));
    std::vector<std::vector<double>> alice_pmf(x_count); // per (x^n) for fixed (mh, k)
    for (std::size_t mh = 0; mh < mh_n; ++mh) {
        for (std::size_t k = 0; k < k_n; ++k) {
            for (std::size_t xf = 0; xf < x_count; ++xf) {
                for (std::size_t i = 0; i < n; ++i) xseq[i] = x_digit(xf, i);
                alice_pmf[xf] = alice_encode_pmf(xseq, mh, k, c, ch);
            }
            for (std::size_t m = 0; m < m_n; ++m) {
                std::array<std::uint64_t, 3> key{0, 0, 0};
                for (std::size_t i = 0; i < n; ++i) {
                    key[0] = key[0] * ch.nw + c.w_symbol(mh, i);
                    key[1] = key[1] * ch.nu + c.u_symbol(mh, m, i);
                    key[2] = key[2] * ch.nv + c.v_symbol(mh, m, k, i);
                }
                auto& cell = cells[key];
                if (cell.first.empty()) {
                    cell.first.assign(xyn, 0.0);
                    cell.second.assign(xyn, 0.0);
                }
                // operational: P(x,y) * 1/K * P_H(mh|y) * P_A(m|x,mh,k)
                for (std::size_t xf = 0; xf < x_count; ++xf) {
                    for (std::size_t i = 0; i < n; ++i) xseq[i] = x_digit(xf, i);
                    for (std::size_t yf = 0; yf < y_count; ++yf) {
                        double pop = 1.0;
                        for (std::size_t i = 0; i < n; ++i)
                            pop *= pxy[xseq[i] * ny + y_digit(yf, i)];
                        if (pop == 0.0) continue;
                        pop *= helper_pmf[yf][mh] * alice_pmf[xf][m] / static_cast<double>(k_n);
                        // flat (x,y) sequence index with per-symbol digit x*ny+y
                        std::size_t xyf = 0;
                        for (std::size_t i = 0; i < n; ++i)
                            xyf = xyf * (nx * ny) + xseq[i] * ny + y_digit(yf, i);
                        cell.first[xyf] += pop;
                    }
                }
                // idealized: uniform triple through the memoryless channel
                for (std::size_t xyf = 0; xyf < xyn; ++xyf) {
                    double pbar = p_triple;
                    for (std::size_t i = 0; i < n; ++i) {
                        std::size_t sym = xy_at(xyf, i);
                        std::size_t row = ch.uvw(c.u_symbol(mh, m, i), c.v_symbol(mh, m, k, i),
                                                 c.w_symbol(mh, i));
                        pbar *= xy_given_uvw.entry(row, sym);
                        if (pbar == 0.0) break;
                    }
                    cell.second[xyf] += pbar;
                }
            }
        }
    }

    double tv = 0.0;
    for (const auto& [key, cell] : cells)
        for (std::size_t i = 0; i < cell.first.size(); ++i)
            tv += std::abs(cell.first[i] - cell.second[i]);
    return 0.5 * tv;
}

std::pair<double, std::vector<double>> exact_induced_tv(const SourceSpec& src,
                                                        const SchemeDist& scheme, std::size_t n,
                                                        Rates rates, std::size_t num_codebooks,
                                                        std::uint64_t seed,
                                                        const SimBudgets& budgets) {
    if (num_codebooks < 1) throw config_error("num_codebooks must be >= 1");
    std::vector<double> tvs(num_codebooks, 0.0);
    for (std::size_t cb = 0; cb < num_codebooks; ++cb) {
        Codebook c(scheme, n, rates, mix64(seed ^ (0xc0deb00cULL + cb)),
                   budgets.codebook_symbols);
        tvs[cb] = exact_induced_tv_for_codebook(src, c, budgets);
    }
    double mean = 0.0;
    for (double v : tvs) mean += v;
    mean /= static_cast<double>(num_codebooks);
    return {mean, std::move(tvs)};
}

double soft_cover_tv(const JointDist& p_u, const Channel& ch, double rate, std::size_t n,
                     std::size_t num_codebooks, std::uint64_t seed,
                     std::size_t enumeration_budget) {
    if (p_u.axes().size() != 1 || ch.inputs().size() != 1 || ch.outputs().size() != 1)
        throw config_error("soft_cover_tv expects single-axis input and channel");
    if (!(p_u.axes()[0] == ch.inputs()[0]))
        throw config_error("soft covering channel input does not match the codeword pmf");

    const std::size_t nu = p_u.size();
    const std::size_t nx = ch.out_size();
    const std::size_t words = index_size(n, rate);

    double xn = 1.0;
    for (std::size_t i = 0; i < n; ++i) xn *= static_cast<double>(nx);
    if (xn * static_cast<double>(words) > static_cast<double>(enumeration_budget))
        throw resource_error("soft covering enumeration exceeds budget; reduce n or rate");
    const std::size_t x_count = static_cast<std::size_t>(xn);

    // memoryless target pmf over X
    std::vector<double> px(nx, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t x = 0; x < nx; ++x) px[x] += p_u.table()[u] * ch.entry(u, x);

    auto x_digit = [&](std::size_t flat, std::size_t i) {
        for (std::size_t j = n; j-- > i + 1;) flat /= nx;
        return flat % nx;
    };

    double mean = 0.0;
    for (std::size_t cb = 0; cb < num_codebooks; ++cb) {
        Substream rng = derive_stream(mix64(seed ^ (0x50f7c0feULL + cb)), Role::Codebook);
        std::vector<std::size_t> u_words(words * n);
        for (std::size_t m = 0; m < words; ++m)
            for (std::size_t i = 0; i < n; ++i)
                u_words[m * n + i] = rng.categorical(p_u.table());

        double tv = 0.0;
        for (std::size_t xf = 0; xf < x_count; ++xf) {
            double induced = 0.0;
            for (std::size_t m = 0; m < words; ++m) {
                double p = 1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    p *= ch.entry(u_words[m * n + i], x_digit(xf, i));
                    if (p == 0.0) break;
                }
                induced += p;
            }
            induced /= static_cast<double>(words);
            double target = 1.0;
            for (std::size_t i = 0; i < n; ++i) target *= px[x_digit(xf, i)];
            tv += std::abs(induced - target);
        }
        mean += 0.5 * tv;
    }
    return mean / static_cast<double>(num_codebooks);
}

} // namespace secoord
