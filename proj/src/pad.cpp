#include "secoord/pad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secoord/prob.hpp"
#include "secoord/rng.hpp"

namespace secoord {

namespace {

// round function: mix the half-block with the round-keyed constant
std::uint64_t round_f(std::uint64_t half, std::uint64_t key, unsigned round) {
    return mix64(half ^ mix64(key + 0x9e3779b9ULL * (round + 1)));
}

constexpr unsigned kRounds = 6;

// balanced Feistel over 2h bits
std::uint64_t feistel2h(std::uint64_t v, unsigned h, std::uint64_t key, bool inverse) {
    const std::uint64_t mask = (1ULL << h) - 1;
    std::uint64_t left = (v >> h) & mask;
    std::uint64_t right = v & mask;
    if (!inverse) {
        for (unsigned r = 0; r < kRounds; ++r) {
            std::uint64_t nl = right;
            std::uint64_t nr = left ^ (round_f(right, key, r) & mask);
            left = nl;
            right = nr;
        }
    } else {
        for (unsigned r = kRounds; r-- > 0;) {
            std::uint64_t pr = left;
            std::uint64_t pl = right ^ (round_f(pr, key, r) & mask);
            left = pl;
            right = pr;
        }
    }
    return (left << h) | right;
}

// Odd widths cycle-walk through the next even width; the walk stays inside
// one permutation cycle so it terminates and inverts exactly.
std::uint64_t walk(std::uint64_t v, unsigned bits, std::uint64_t key, bool inverse) {
    const unsigned h = (bits + 1) / 2;
    const std::uint64_t limit = 1ULL << bits;
    std::uint64_t t = v;
    do {
        t = feistel2h(t, h, key, inverse);
    } while (t >= limit);
    return t;
}

} // namespace

std::uint64_t feistel_permute(std::uint64_t value, unsigned bits, std::uint64_t key) {
    if (bits == 0) return 0;
    return walk(value, bits, key, false);
}

std::uint64_t feistel_invert(std::uint64_t value, unsigned bits, std::uint64_t key) {
    if (bits == 0) return 0;
    return walk(value, bits, key, true);
}

PadReport pad_scheme(const PadConfig& cfg) {
    if (!(cfg.p >= 0.0 && cfg.p <= 0.5))
        throw config_error("pad probability p must lie in [0, 1/2]");
    if (cfg.n < 1) throw config_error("pad block length n must be >= 1");
    if (cfg.episodes < 1) throw config_error("pad episodes must be >= 1");
    if (cfg.n > cfg.max_n) {
        std::ostringstream os;
        os << "pad posterior enumerates 2^" << cfg.n << " side-information sequences, over the n="
           << cfg.max_n << " budget";
        throw resource_error(os.str());
    }
    const std::size_t n = cfg.n;
    const std::uint64_t space = 1ULL << n;

    PadReport rep;
    rep.n = n;
    rep.p = cfg.p;
    rep.episodes = cfg.episodes;
    rep.seed = cfg.seed;
    rep.formula = cfg.p + binary_entropy(cfg.p) * (0.5 - cfg.p);

    // log-weights of side-information sequences by popcount
    std::vector<double> log_py(n + 1, 0.0);
    for (std::size_t ones = 0; ones <= n; ++ones) {
        double lw = 0.0;
        if (cfg.p == 0.0) {
            lw = ones == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
        } else if (cfg.p == 0.5) {
            lw = -static_cast<double>(n);
        } else {
            lw = static_cast<double>(ones) * std::log2(cfg.p) +
                 static_cast<double>(n - ones) * std::log2(1.0 - cfg.p);
        }
        log_py[ones] = lw;
    }

    std::vector<std::vector<double>> sym_payoff(n, std::vector<double>(cfg.episodes, 0.0));
    std::vector<double> block(cfg.episodes, 0.0);

    const std::uint64_t perm_master = mix64(cfg.seed ^ 0xf31573f31573ULL);

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> weight(space);
        std::vector<std::uint64_t> d_of_y(space);
        std::vector<char> alive(space);

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (long long e = 0; e < static_cast<long long>(cfg.episodes); ++e) {
            Substream rng = derive_stream(cfg.seed, Role::Pad, static_cast<std::uint64_t>(e));
            std::uint64_t y = 0, d = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (rng.uniform01() < cfg.p) y |= (1ULL << (n - 1 - i));
                if (rng.uniform01() < 0.5) d |= (1ULL << (n - 1 - i));
            }
            const std::uint64_t x = y ^ d;

            // Alice: m = sigma_y(d); Bob: d = sigma_y^{-1}(m), x = y xor d
            const std::uint64_t m =
                feistel_permute(d, static_cast<unsigned>(n), mix64(perm_master ^ y));
            const std::uint64_t decoded =
                y ^ feistel_invert(m, static_cast<unsigned>(n), mix64(perm_master ^ y));
            if (decoded != x) throw internal_error("pad decoder failed to invert the bijection");

            // Eve: for every candidate y', the unique d' consistent with m
            for (std::uint64_t yc = 0; yc < space; ++yc) {
                d_of_y[yc] = feistel_invert(m, static_cast<unsigned>(n), mix64(perm_master ^ yc));
                const int ones = __builtin_popcountll(yc);
                double lw = log_py[static_cast<std::size_t>(ones)];
                weight[yc] = std::isfinite(lw) ? std::exp2(lw) : 0.0;
                alive[yc] = weight[yc] > 0.0 ? 1 : 0;
            }

            double ep_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::uint64_t bit = 1ULL << (n - 1 - i);
                double score1 = 0.0, total = 0.0;
                for (std::uint64_t yc = 0; yc < space; ++yc) {
                    if (!alive[yc]) continue;
                    total += weight[yc];
                    const std::uint64_t xc = (yc ^ d_of_y[yc]) & bit;
                    if (xc) score1 += weight[yc];
                }
                // z_i = likelier X bit; ties toward 0
                const std::size_t z = (score1 > total - score1 + 1e-18) ? 1 : 0;
                const std::size_t xi = (x & bit) ? 1 : 0;
                const double pay = (z == xi) ? 0.0 : 1.0;
                sym_payoff[i][e] = pay;
                ep_sum += pay;
                // reveal d_i, prune inconsistent candidates
                for (std::uint64_t yc = 0; yc < space; ++yc)
                    if (alive[yc] && ((d_of_y[yc] ^ d) & bit)) alive[yc] = 0;
            }
            block[e] = ep_sum / static_cast<double>(n);
        }
    }

    auto mom = [](const std::vector<double>& xs) {
        double mean = 0.0;
        for (double v : xs) mean += v;
        mean /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double v : xs) ss += (v - mean) * (v - mean);
        double se = xs.size() > 1 ? std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) /
                                              static_cast<double>(xs.size()))
                                  : 0.0;
        return std::pair<double, double>(mean, se);
    };
    rep.profile_mean.resize(n);
    rep.profile_stderr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [m, s] = mom(sym_payoff[i]);
        rep.profile_mean[i] = m;
        rep.profile_stderr[i] = s;
    }
    auto [bm, bs] = mom(block);
    rep.block_mean = bm;
    rep.block_stderr = bs;
    return rep;
}

} // namespace secoord
