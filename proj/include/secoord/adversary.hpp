#ifndef SECOORD_ADVERSARY_HPP
#define SECOORD_ADVERSARY_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secoord/codec.hpp"
#include "secoord/region.hpp"

namespace secoord {

/// Deterministic map (u, w) -> z. Rows flat as u * |W| + w.
struct SingleLetterStrategy {
    std::size_t nu = 0, nw = 0;
    std::vector<std::size_t> z;

    std::size_t at(std::size_t u, std::size_t w) const { return z[u * nw + w]; }
};

/// Map (u, w) -> pmf over X (the log-loss action space).
struct BeliefStrategy {
    std::size_t nu = 0, nw = 0, nx = 0;
    std::vector<double> beliefs; // [(u,w)][x]

    std::span<const double> at(std::size_t u, std::size_t w) const {
        return std::span(beliefs).subspan((u * nw + w) * nx, nx);
    }
};

/// Exact per-(u,w) minimization of E[pi(X, Xhat, z)]. Ties break toward the
/// lowest z index. The returned value is the payoff coordinate of the region.
std::pair<SingleLetterStrategy, double> single_letter_best_response(const SchemeDist& q,
                                                                    const PayoffFn& payoff);

/// The optimal belief is the posterior Q_{X|U,W}; the value is H(X|U,W) bits.
std::pair<BeliefStrategy, double> log_loss_best_response(const SchemeDist& q);

// ---------------------------------------------------------------------------
// Simulation-time adversaries

struct AdversaryAction {
    std::size_t z = 0;
    std::vector<double> belief; // non-empty iff the payoff is log-loss
};

/// Sequential adversary run inside an episode: observes (m_H, m) up front and
/// the disclosed past d^{i-1} symbol by symbol.
class AdversaryBase {
  public:
    virtual ~AdversaryBase() = default;
    virtual std::string name() const = 0;
    virtual void begin_episode(const Codebook& c, std::size_t m_h, std::size_t m) = 0;
    /// i is 1-based; disclosed_prev is d_{i-1} (absent at i = 1).
    virtual AdversaryAction step(std::size_t i, std::optional<std::size_t> disclosed_prev) = 0;
};

/// Plays the single-letter best response z(u_i, w_i); ignores disclosure.
class SingleLetterAdversary : public AdversaryBase {
  public:
    SingleLetterAdversary(const SchemeDist& scheme, const PayoffFn& payoff);
    std::string name() const override { return "single_letter"; }
    void begin_episode(const Codebook& c, std::size_t m_h, std::size_t m) override;
    AdversaryAction step(std::size_t i, std::optional<std::size_t> disclosed_prev) override;

  private:
    bool log_loss_;
    SingleLetterStrategy strategy_;
    BeliefStrategy beliefs_;
    const Codebook* codebook_ = nullptr;
    std::size_t m_h_ = 0, m_ = 0;
};

/// Functional state of the causal-disclosure Bayesian adversary: the codebook
/// in use, the observed (m_H, m), the posterior over the secret key, and the
/// current time. When denied M the posterior ranges over (m, k) pairs.
struct BayesianAdversaryState {
    const Codebook* codebook = nullptr;
    const SchemeChannels* channels = nullptr;
    std::size_t m_h = 0;
    std::size_t m = 0; // ignored when !see_m
    bool see_m = true;
    std::size_t time = 1; // next step, 1-based
    std::vector<double> posterior;
};

BayesianAdversaryState bayesian_begin(const Codebook& c, const SchemeChannels& ch,
                                      std::size_t m_h, std::size_t m, bool see_m,
                                      std::size_t max_posterior_states);

/// One adversary move: fold the disclosed d_{i-1} into the posterior by exact
/// Bayes under the idealized per-symbol channels, then pick the action
/// minimizing the posterior-weighted expected payoff (ties toward lowest z).
std::pair<AdversaryAction, BayesianAdversaryState> bayesian_step(
    const BayesianAdversaryState& state, std::optional<std::size_t> disclosed_prev,
    const PayoffFn& payoff);

/// Episode-facing wrapper around bayesian_begin/bayesian_step.
class BayesianAdversary : public AdversaryBase {
  public:
    /// see_m = false models an adversary denied the public message M.
    BayesianAdversary(const SchemeDist& scheme, const PayoffFn& payoff, bool see_m = true,
                      std::size_t max_posterior_states = 10'000'000);
    std::string name() const override { return see_m_ ? "bayesian" : "bayesian_denied_m"; }
    void begin_episode(const Codebook& c, std::size_t m_h, std::size_t m) override;
    AdversaryAction step(std::size_t i, std::optional<std::size_t> disclosed_prev) override;

    std::span<const double> posterior() const { return state_.posterior; }

  private:
    SchemeChannels channels_;
    PayoffFn payoff_;
    bool see_m_;
    std::size_t max_posterior_states_;
    BayesianAdversaryState state_;
};

std::unique_ptr<AdversaryBase> make_adversary(const std::string& type, const SchemeDist& scheme,
                                              const PayoffFn& payoff,
                                              std::size_t max_posterior_states = 10'000'000);

} // namespace secoord

#endif
