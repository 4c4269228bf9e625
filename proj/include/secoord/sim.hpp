#ifndef SECOORD_SIM_HPP
#define SECOORD_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secoord/adversary.hpp"
#include "secoord/codec.hpp"

namespace secoord {

struct EpisodeTrace {
    std::vector<std::size_t> x, y, d;
    std::size_t m_h = 0, m = 0, k = 0;
    std::vector<std::size_t> xhat;
    std::vector<std::size_t> z;                   // finite-action adversaries
    std::vector<std::vector<double>> z_beliefs;   // log-loss adversaries
    std::vector<std::vector<double>> symbol_payoffs; // [payoff][i]
    std::vector<double> block_payoffs;               // [payoff]
};

struct SimBudgets {
    std::size_t codebook_symbols = 100'000'000;
    std::size_t posterior_states = 10'000'000;
    std::size_t enumeration = 100'000'000;
};

/// One coordination episode: draw (x,y,d)^n iid and the uniform key, run both
/// likelihood encoders and the stochastic decoder, play the adversary
/// causally, and record per-symbol payoffs.
EpisodeTrace run_episode(const SourceSpec& src, const Codebook& c, const SchemeChannels& ch,
                         AdversaryBase& adversary, const std::vector<PayoffFn>& payoffs,
                         std::uint64_t master_seed, std::uint64_t episode_index);

struct AdversaryReport {
    std::string name;
    std::vector<double> payoff_mean;   // [payoff]
    std::vector<double> payoff_stderr; // [payoff]
    std::vector<double> min_symbol_payoff_mean; // diagnostic only
    std::vector<std::vector<double>> profile_mean;   // [payoff][i]
    std::vector<std::vector<double>> profile_stderr; // [payoff][i]
    std::optional<SingleLetterStrategy> strategy;    // audit copy when single-letter
};

struct TvDiagnostics {
    double mean_tv = 0.0;
    std::vector<double> per_codebook_tv;
};

struct SimReport {
    std::size_t n = 0;
    Rates rates;
    std::size_t episodes = 0;
    std::uint64_t seed = 0;
    std::vector<AdversaryReport> adversaries;
    std::optional<TvDiagnostics> tv;
};

/// Monte Carlo estimate of the block-average payoffs. Episodes use
/// per-episode substreams, so serial and parallel runs produce identical
/// reports; all adversaries face the same system realizations. Episode loops
/// run under OpenMP when available.
SimReport monte_carlo(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                      Rates rates, const std::vector<std::string>& adversary_types,
                      std::size_t episodes, std::uint64_t seed,
                      const SimBudgets& budgets = {}, bool with_tv = false,
                      std::size_t tv_codebooks = 5);

/// Plain single-threaded reference of the same estimator, kept for testing
/// and benchmarking the parallel path against.
SimReport monte_carlo_serial(const SourceSpec& src, const SchemeDist& scheme, std::size_t n,
                             Rates rates, const std::vector<std::string>& adversary_types,
                             std::size_t episodes, std::uint64_t seed,
                             const SimBudgets& budgets = {}, bool with_tv = false,
                             std::size_t tv_codebooks = 5);

/// Exact total variation between the distribution the encoders/decoder induce
/// on (X^n, Y^n, W^n, U^n, V^n, Xhat^n) and the idealized memoryless product,
/// averaged over sampled codebooks.
std::pair<double, std::vector<double>> exact_induced_tv(const SourceSpec& src,
                                                        const SchemeDist& scheme, std::size_t n,
                                                        Rates rates, std::size_t num_codebooks,
                                                        std::uint64_t seed,
                                                        const SimBudgets& budgets = {});
/// Same for one already-sampled codebook.
double exact_induced_tv_for_codebook(const SourceSpec& src, const Codebook& c,
                                     const SimBudgets& budgets = {});

/// Single-layer soft-covering experiment: a rate-R codebook of iid u-words,
/// channel outputs compared in TV against the memoryless target.
double soft_cover_tv(const JointDist& p_u, const Channel& ch, double rate, std::size_t n,
                     std::size_t num_codebooks, std::uint64_t seed,
                     std::size_t enumeration_budget = 100'000'000);

} // namespace secoord

#endif
