#include "secoord/codec.hpp"

#include <cmath>
#include <sstream>

namespace secoord {

std::size_t index_size(std::size_t n, double rate) {
    if (!(rate >= 0.0)) throw config_error("negative rate");
    double raw = std::exp2(static_cast<double>(n) * rate);
    if (raw > 1e15) throw resource_error("index set 2^(n*rate) too large to materialize");
    double rounded = std::round(raw);
    if (std::abs(raw - rounded) < 1e-6) return static_cast<std::size_t>(rounded);
    return static_cast<std::size_t>(std::ceil(raw));
}

namespace {

// conditional(joint, target, given) flattened with rows in the digit order
// used throughout the simulator.
std::vector<double> cond_table(const JointDist& j, const AxisSet& target, const AxisSet& given) {
    Channel ch = conditional(j, target, given);
    // Channel rows/cols are already canonical (given/target names sorted);
    // callers pass axis groups whose sorted order matches their flat layout.
    return ch.table();
}

} // namespace

SchemeChannels::SchemeChannels(const SchemeDist& scheme) {
    const JointDist& j = scheme.joint;
    nx = j.axis(kAxisX).size();
    ny = j.axis(kAxisY).size();
    nd = j.axis(kAxisD).size();
    nw = j.axis(kAxisW).size();
    nu = j.axis(kAxisU).size();
    nv = j.axis(kAxisV).size();
    nxh = j.axis(kAxisXhat).size();

    y_given_w = cond_table(j, {kAxisY}, {kAxisW});
    x_given_uvw = cond_table(j, {kAxisX}, {kAxisU, kAxisV, kAxisW});
    xhat_given_uvw = cond_table(j, {kAxisXhat}, {kAxisU, kAxisV, kAxisW});
    d_given_uvw = cond_table(j, {kAxisD}, {kAxisU, kAxisV, kAxisW});
    x_given_uw = cond_table(j, {kAxisX}, {kAxisU, kAxisW});
    w_pmf = marginal(j, {kAxisW}).table();
    u_given_w = cond_table(j, {kAxisU}, {kAxisW});
    v_given_uw = cond_table(j, {kAxisV}, {kAxisU, kAxisW});

    // joint conditional of (x, xhat) given (u,v,w): product of the two
    // factors since Xhat - (U,V,W) - X holds for admissible schemes
    xxh_given_uvw.assign(nu * nv * nw * nx * nxh, 0.0);
    JointDist m = marginal(j, {kAxisX, kAxisXhat, kAxisU, kAxisV, kAxisW});
    Channel c = conditional(m, {kAxisX, kAxisXhat}, {kAxisU, kAxisV, kAxisW});
    // channel outputs canonical (X, Xhat): out = x*nxh + xhat; rows (U,V,W)
    xxh_given_uvw = c.table();
}

Codebook::Codebook(const SchemeDist& scheme, std::size_t n, Rates rates, std::uint64_t seed,
                   std::size_t max_symbols)
    : scheme_(scheme), n_(n), rates_(rates), seed_(seed) {
    if (n == 0) throw config_error("block length n must be >= 1");
    num_mh_ = index_size(n, rates.helper_rate);
    num_m_ = index_size(n, rates.msg_rate);
    num_k_ = index_size(n, rates.key_rate);

    const double total = static_cast<double>(num_mh_) * (1.0 + static_cast<double>(num_m_) *
                         (1.0 + static_cast<double>(num_k_))) * static_cast<double>(n);
    if (total > static_cast<double>(max_symbols)) {
        std::ostringstream os;
        os << "codebook needs " << total << " symbols, budget " << max_symbols
           << "; reduce n or rates";
        throw resource_error(os.str());
    }

    SchemeChannels ch(scheme_);
    Substream rng = derive_stream(seed, Role::Codebook);

    w_words_.resize(num_mh_ * n_);
    for (std::size_t mh = 0; mh < num_mh_; ++mh)
        for (std::size_t i = 0; i < n_; ++i)
            w_words_[mh * n_ + i] = rng.categorical(ch.w_pmf);

    u_words_.resize(num_mh_ * num_m_ * n_);
    for (std::size_t mh = 0; mh < num_mh_; ++mh)
        for (std::size_t m = 0; m < num_m_; ++m)
            for (std::size_t i = 0; i < n_; ++i) {
                std::size_t w = w_symbol(mh, i);
                u_words_[(mh * num_m_ + m) * n_ + i] = rng.categorical(
                    std::span(ch.u_given_w).subspan(w * ch.nu, ch.nu));
            }

    v_words_.resize(num_mh_ * num_m_ * num_k_ * n_);
    for (std::size_t mh = 0; mh < num_mh_; ++mh)
        for (std::size_t m = 0; m < num_m_; ++m)
            for (std::size_t k = 0; k < num_k_; ++k)
                for (std::size_t i = 0; i < n_; ++i) {
                    std::size_t w = w_symbol(mh, i);
                    std::size_t u = u_symbol(mh, m, i);
                    v_words_[((mh * num_m_ + m) * num_k_ + k) * n_ + i] = rng.categorical(
                        std::span(ch.v_given_uw).subspan((u * ch.nw + w) * ch.nv, ch.nv));
                }
}

void Codebook::permute_messages(const std::vector<std::size_t>& perm) {
    if (perm.size() != num_m_) throw config_error("message permutation size mismatch");
    std::vector<std::size_t> u2(u_words_.size()), v2(v_words_.size());
    for (std::size_t mh = 0; mh < num_mh_; ++mh)
        for (std::size_t m = 0; m < num_m_; ++m) {
            for (std::size_t i = 0; i < n_; ++i)
                u2[(mh * num_m_ + perm[m]) * n_ + i] = u_words_[(mh * num_m_ + m) * n_ + i];
            for (std::size_t k = 0; k < num_k_; ++k)
                for (std::size_t i = 0; i < n_; ++i)
                    v2[((mh * num_m_ + perm[m]) * num_k_ + k) * n_ + i] =
                        v_words_[((mh * num_m_ + m) * num_k_ + k) * n_ + i];
        }
    u_words_ = std::move(u2);
    v_words_ = std::move(v2);
}

namespace {

// Likelihood weights computed in log space and exponentiated against the max;
// exact zeros stay zero. An all-zero weight vector (support mismatch) becomes
// the uniform pmf so encoders stay total.
std::vector<double> normalize_log_weights(std::vector<double>& logw) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logw) mx = std::max(mx, v);
    std::vector<double> w(logw.size(), 0.0);
    if (!std::isfinite(mx)) {
        w.assign(logw.size(), 1.0 / static_cast<double>(logw.size()));
        return w;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        if (std::isfinite(logw[i])) {
            w[i] = std::exp(logw[i] - mx);
            total += w[i];
        }
    }
    for (double& v : w) v /= total;
    return w;
}

} // namespace

std::vector<double> helper_encode_pmf(const std::vector<std::size_t>& y, const Codebook& c,
                                      const SchemeChannels& ch) {
    std::vector<double> logw(c.num_helper_msgs(), 0.0);
    for (std::size_t mh = 0; mh < c.num_helper_msgs(); ++mh) {
        double lw = 0.0;
        for (std::size_t i = 0; i < c.n(); ++i) {
            double p = ch.y_given_w[c.w_symbol(mh, i) * ch.ny + y[i]];
            lw += p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        }
        logw[mh] = lw;
    }
    return normalize_log_weights(logw);
}

std::size_t helper_encode(const std::vector<std::size_t>& y, const Codebook& c,
                          const SchemeChannels& ch, Substream& rng) {
    return rng.categorical(helper_encode_pmf(y, c, ch));
}

std::vector<double> alice_encode_pmf(const std::vector<std::size_t>& x, std::size_t m_h,
                                     std::size_t k, const Codebook& c,
                                     const SchemeChannels& ch) {
    std::vector<double> logw(c.num_msgs(), 0.0);
    for (std::size_t m = 0; m < c.num_msgs(); ++m) {
        double lw = 0.0;
        for (std::size_t i = 0; i < c.n(); ++i) {
            std::size_t row = ch.uvw(c.u_symbol(m_h, m, i), c.v_symbol(m_h, m, k, i),
                                     c.w_symbol(m_h, i));
            double p = ch.x_given_uvw[row * ch.nx + x[i]];
            lw += p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        }
        logw[m] = lw;
    }
    return normalize_log_weights(logw);
}

std::size_t alice_encode(const std::vector<std::size_t>& x, std::size_t m_h, std::size_t k,
                         const Codebook& c, const SchemeChannels& ch, Substream& rng) {
    return rng.categorical(alice_encode_pmf(x, m_h, k, c, ch));
}

std::vector<std::size_t> bob_decode(std::size_t m_h, std::size_t m, std::size_t k,
                                    const Codebook& c, const SchemeChannels& ch,
                                    Substream& rng) {
    std::vector<std::size_t> xhat(c.n());
    for (std::size_t i = 0; i < c.n(); ++i) {
        std::size_t row = ch.uvw(c.u_symbol(m_h, m, i), c.v_symbol(m_h, m, k, i),
                                 c.w_symbol(m_h, i));
        xhat[i] = rng.categorical(std::span(ch.xhat_given_uvw).subspan(row * ch.nxh, ch.nxh));
    }
    return xhat;
}

} // namespace secoord
