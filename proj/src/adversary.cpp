#include "secoord/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace secoord {

namespace {

void check_payoff_axes(const SchemeDist& q, const PayoffFn& payoff) {
    if (payoff.x_axis.symbols != q.joint.axis(kAxisX).symbols)
        throw config_error("payoff X alphabet does not match the scheme");
    if (payoff.xhat_axis.symbols != q.joint.axis(kAxisXhat).symbols)
        throw config_error("payoff Xhat alphabet does not match the scheme");
}

} // namespace

std::pair<SingleLetterStrategy, double> single_letter_best_response(const SchemeDist& q,
                                                                    const PayoffFn& payoff) {
    if (payoff.log_loss)
        throw config_error("single_letter_best_response needs a finite action payoff");
    check_payoff_axes(q, payoff);

    JointDist m = marginal(q.joint, {kAxisX, kAxisXhat, kAxisU, kAxisW});
    const std::size_t nx = m.axis(kAxisX).size();
    const std::size_t nxh = m.axis(kAxisXhat).size();
    const std::size_t nu = m.axis(kAxisU).size();
    const std::size_t nw = m.axis(kAxisW).size();
    const std::size_t nz = payoff.z_axis.size();

    // canonical axis order of m: U, W, X, Xhat
    std::vector<double> cell(nx * nxh);
    SingleLetterStrategy strat;
    strat.nu = nu;
    strat.nw = nw;
    strat.z.assign(nu * nw, 0);
    double value = 0.0;

    std::vector<std::size_t> digits(4);
    for (std::size_t u = 0; u < nu; ++u) {
        for (std::size_t w = 0; w < nw; ++w) {
            std::fill(cell.begin(), cell.end(), 0.0);
            double pcell = 0.0;
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t xh = 0; xh < nxh; ++xh) {
                    digits = {u, w, x, xh};
                    double p = m.table()[m.flat(digits)];
                    cell[x * nxh + xh] = p;
                    pcell += p;
                }
            std::size_t best_z = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t z = 0; z < nz; ++z) {
                double s = 0.0;
                for (std::size_t x = 0; x < nx; ++x)
                    for (std::size_t xh = 0; xh < nxh; ++xh)
                        s += cell[x * nxh + xh] * payoff.value(x, xh, z);
                if (s < best - 1e-15) {
                    best = s;
                    best_z = z;
                }
            }
            strat.z[u * nw + w] = best_z;
            if (pcell > 0.0) value += best;
        }
    }
    return {std::move(strat), value};
}

std::pair<BeliefStrategy, double> log_loss_best_response(const SchemeDist& q) {
    JointDist m = marginal(q.joint, {kAxisX, kAxisU, kAxisW});
    const std::size_t nx = m.axis(kAxisX).size();
    const std::size_t nu = m.axis(kAxisU).size();
    const std::size_t nw = m.axis(kAxisW).size();

    Channel post = conditional(m, {kAxisX}, {kAxisU, kAxisW});
    BeliefStrategy strat;
    strat.nu = nu;
    strat.nw = nw;
    strat.nx = nx;
    strat.beliefs.assign(nu * nw * nx, 0.0);
    for (std::size_t u = 0; u < nu; ++u)
        for (std::size_t w = 0; w < nw; ++w)
            for (std::size_t x = 0; x < nx; ++x)
                strat.beliefs[(u * nw + w) * nx + x] = post.entry(u * nw + w, x);
    return {std::move(strat), cond_entropy(q.joint, {kAxisX}, {kAxisU, kAxisW})};
}

// ---------------------------------------------------------------------------

SingleLetterAdversary::SingleLetterAdversary(const SchemeDist& scheme, const PayoffFn& payoff)
    : log_loss_(payoff.log_loss) {
    if (log_loss_) {
        beliefs_ = log_loss_best_response(scheme).first;
    } else {
        strategy_ = single_letter_best_response(scheme, payoff).first;
    }
}

void SingleLetterAdversary::begin_episode(const Codebook& c, std::size_t m_h, std::size_t m) {
    codebook_ = &c;
    m_h_ = m_h;
    m_ = m;
}

AdversaryAction SingleLetterAdversary::step(std::size_t i, std::optional<std::size_t>) {
    const std::size_t u = codebook_->u_symbol(m_h_, m_, i - 1);
    const std::size_t w = codebook_->w_symbol(m_h_, i - 1);
    AdversaryAction a;
    if (log_loss_) {
        auto b = beliefs_.at(u, w);
        a.belief.assign(b.begin(), b.end());
    } else {
        a.z = strategy_.at(u, w);
    }
    return a;
}

// ---------------------------------------------------------------------------

BayesianAdversaryState bayesian_begin(const Codebook& c, const SchemeChannels& ch,
                                      std::size_t m_h, std::size_t m, bool see_m,
                                      std::size_t max_posterior_states) {
    BayesianAdversaryState st;
    st.codebook = &c;
    st.channels = &ch;
    st.m_h = m_h;
    st.m = m;
    st.see_m = see_m;
    st.time = 1;
    const std::size_t states = see_m ? c.num_keys() : c.num_msgs() * c.num_keys();
    const double cost = static_cast<double>(states) * static_cast<double>(c.n());
    if (cost > static_cast<double>(max_posterior_states)) {
        std::ostringstream os;
        os << "bayesian adversary needs " << cost << " posterior updates, budget "
           << max_posterior_states << "; use a smaller n";
        throw resource_error(os.str());
    }
    st.posterior.assign(states, 1.0 / static_cast<double>(states));
    return st;
}

namespace {

std::size_t state_m(const BayesianAdversaryState& st, std::size_t h) {
    return st.see_m ? st.m : h / st.codebook->num_keys();
}
std::size_t state_k(const BayesianAdversaryState& st, std::size_t h) {
    return st.see_m ? h : h % st.codebook->num_keys();
}

} // namespace

std::pair<AdversaryAction, BayesianAdversaryState> bayesian_step(
    const BayesianAdversaryState& state, std::optional<std::size_t> disclosed_prev,
    const PayoffFn& payoff) {
    BayesianAdversaryState st = state;
    const Codebook& c = *st.codebook;
    const SchemeChannels& ch = *st.channels;
    const std::size_t i = st.time;

    if (disclosed_prev.has_value() && i > 1) {
        const std::size_t pos = i - 2; // 0-based index of d_{i-1}
        double total = 0.0;
        for (std::size_t h = 0; h < st.posterior.size(); ++h) {
            const std::size_t m = state_m(st, h), k = state_k(st, h);
            const std::size_t row = ch.uvw(c.u_symbol(st.m_h, m, pos),
                                           c.v_symbol(st.m_h, m, k, pos),
                                           c.w_symbol(st.m_h, pos));
            st.posterior[h] *= ch.d_given_uvw[row * ch.nd + *disclosed_prev];
            total += st.posterior[h];
        }
        if (total > 0.0) {
            for (double& p : st.posterior) p /= total;
        } else {
            // disclosed symbol impossible under the idealized model; reset
            st.posterior.assign(st.posterior.size(), 1.0 / static_cast<double>(st.posterior.size()));
        }
    }

    const std::size_t pos = i - 1;
    AdversaryAction action;
    if (payoff.log_loss) {
        // belief about x_i: posterior mixture of Q_{X|UVW}
        action.belief.assign(ch.nx, 0.0);
        for (std::size_t h = 0; h < st.posterior.size(); ++h) {
            if (st.posterior[h] == 0.0) continue;
            const std::size_t m = state_m(st, h), k = state_k(st, h);
            const std::size_t row = ch.uvw(c.u_symbol(st.m_h, m, pos),
                                           c.v_symbol(st.m_h, m, k, pos),
                                           c.w_symbol(st.m_h, pos));
            for (std::size_t x = 0; x < ch.nx; ++x)
                action.belief[x] += st.posterior[h] * ch.x_given_uvw[row * ch.nx + x];
        }
    } else {
        const std::size_t nz = payoff.z_axis.size();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_z = 0;
        for (std::size_t z = 0; z < nz; ++z) {
            double s = 0.0;
            for (std::size_t h = 0; h < st.posterior.size(); ++h) {
                if (st.posterior[h] == 0.0) continue;
                const std::size_t m = state_m(st, h), k = state_k(st, h);
                const std::size_t row = ch.uvw(c.u_symbol(st.m_h, m, pos),
                                               c.v_symbol(st.m_h, m, k, pos),
                                               c.w_symbol(st.m_h, pos));
                double e = 0.0;
                for (std::size_t x = 0; x < ch.nx; ++x)
                    for (std::size_t xh = 0; xh < ch.nxh; ++xh)
                        e += ch.xxh_given_uvw[row * ch.nx * ch.nxh + x * ch.nxh + xh] *
                             payoff.value(x, xh, z);
                s += st.posterior[h] * e;
            }
            if (s < best - 1e-15) {
                best = s;
                best_z = z;
            }
        }
        action.z = best_z;
    }
    st.time = i + 1;
    return {std::move(action), std::move(st)};
}

BayesianAdversary::BayesianAdversary(const SchemeDist& scheme, const PayoffFn& payoff,
                                     bool see_m, std::size_t max_posterior_states)
    : channels_(scheme), payoff_(payoff), see_m_(see_m),
      max_posterior_states_(max_posterior_states) {
    check_payoff_axes(scheme, payoff_);
}

void BayesianAdversary::begin_episode(const Codebook& c, std::size_t m_h, std::size_t m) {
    state_ = bayesian_begin(c, channels_, m_h, m, see_m_, max_posterior_states_);
}

AdversaryAction BayesianAdversary::step(std::size_t i, std::optional<std::size_t> disclosed_prev) {
    auto [action, next] = bayesian_step(state_, disclosed_prev, payoff_);
    state_ = std::move(next);
    return action;
}

std::unique_ptr<AdversaryBase> make_adversary(const std::string& type, const SchemeDist& scheme,
                                              const PayoffFn& payoff,
                                              std::size_t max_posterior_states) {
    if (type == "single_letter")
        return std::make_unique<SingleLetterAdversary>(scheme, payoff);
    if (type == "bayesian")
        return std::make_unique<BayesianAdversary>(scheme, payoff, true, max_posterior_states);
    if (type == "bayesian_denied_m")
        return std::make_unique<BayesianAdversary>(scheme, payoff, false, max_posterior_states);
    throw config_error("unknown adversary type '" + type + "'");
}

} // namespace secoord
