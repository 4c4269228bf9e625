#ifndef SECOORD_CODEC_HPP
#define SECOORD_CODEC_HPP

#include <cstdint>
#include <vector>

#include "secoord/region.hpp"
#include "secoord/rng.hpp"

namespace secoord {

struct Rates {
    double helper_rate = 0.0;
    double msg_rate = 0.0;
    double key_rate = 0.0;
};

/// ceil(2^(n*rate)) message-index count, robust to representation noise when
/// n*rate lands on an integer.
std::size_t index_size(std::size_t n, double rate);

/// Superposition codebook: w-words indexed by m_H, u-words by (m_H, m),
/// v-words by (m_H, m, k). Immutable after sampling; shareable across threads.
class Codebook {
  public:
    /// Draw all codewords: w iid from Q_W, u iid from Q_{U|W} given the parent
    /// w-word, v iid from Q_{V|U,W} given both parents. Deterministic in seed.
    Codebook(const SchemeDist& scheme, std::size_t n, Rates rates, std::uint64_t seed,
             std::size_t max_symbols = 100'000'000);

    std::size_t n() const { return n_; }
    const Rates& rates() const { return rates_; }
    std::size_t num_helper_msgs() const { return num_mh_; }
    std::size_t num_msgs() const { return num_m_; }
    std::size_t num_keys() const { return num_k_; }
    std::uint64_t seed() const { return seed_; }
    const SchemeDist& scheme() const { return scheme_; }

    std::size_t w_symbol(std::size_t m_h, std::size_t i) const {
        return w_words_[m_h * n_ + i];
    }
    std::size_t u_symbol(std::size_t m_h, std::size_t m, std::size_t i) const {
        return u_words_[(m_h * num_m_ + m) * n_ + i];
    }
    std::size_t v_symbol(std::size_t m_h, std::size_t m, std::size_t k, std::size_t i) const {
        return v_words_[((m_h * num_m_ + m) * num_k_ + k) * n_ + i];
    }

    /// Test hook: relabel message indices in place (codebook symmetry checks).
    void permute_messages(const std::vector<std::size_t>& perm);

  private:
    SchemeDist scheme_;
    std::size_t n_;
    Rates rates_;
    std::size_t num_mh_, num_m_, num_k_;
    std::uint64_t seed_;
    std::vector<std::size_t> w_words_, u_words_, v_words_;
};

/// Per-symbol conditionals of the scheme used by encoders, decoder and the
/// idealized-model adversary. Rows are flat (u,v,w) etc. in canonical digit
/// order; zero-probability rows are uniform.
struct SchemeChannels {
    std::size_t nx = 0, ny = 0, nd = 0, nw = 0, nu = 0, nv = 0, nxh = 0;
    std::vector<double> y_given_w;        // [w][y]
    std::vector<double> x_given_uvw;      // [(u,v,w)][x]
    std::vector<double> xhat_given_uvw;   // [(u,v,w)][xhat]
    std::vector<double> d_given_uvw;      // [(u,v,w)][d]
    std::vector<double> x_given_uw;       // [(u,w)][x]
    std::vector<double> xxh_given_uvw;    // [(u,v,w)][x*nxh+xhat]
    std::vector<double> w_pmf;            // [w]
    std::vector<double> u_given_w;        // [w][u]
    std::vector<double> v_given_uw;       // [(u,w)][v]

    explicit SchemeChannels(const SchemeDist& scheme);
    std::size_t uvw(std::size_t u, std::size_t v, std::size_t w) const {
        return (u * nv + v) * nw + w;
    }
};

/// Helper's likelihood-encoder selection pmf over m_H for an observed y^n:
/// weights prod_i Q_{Y|W}(y_i | w_i(m_H)), normalized; all-zero weights fall
/// back to uniform.
std::vector<double> helper_encode_pmf(const std::vector<std::size_t>& y, const Codebook& c,
                                      const SchemeChannels& ch);
std::size_t helper_encode(const std::vector<std::size_t>& y, const Codebook& c,
                          const SchemeChannels& ch, Substream& rng);

/// Alice's likelihood-encoder pmf over m given (x^n, m_H, k): weights
/// prod_i Q_{X|UVW}(x_i | u_i, v_i, w_i).
std::vector<double> alice_encode_pmf(const std::vector<std::size_t>& x, std::size_t m_h,
                                     std::size_t k, const Codebook& c,
                                     const SchemeChannels& ch);
std::size_t alice_encode(const std::vector<std::size_t>& x, std::size_t m_h, std::size_t k,
                         const Codebook& c, const SchemeChannels& ch, Substream& rng);

/// Stochastic decoder: xhat_i drawn independently from Q_{Xhat|UVW}.
std::vector<std::size_t> bob_decode(std::size_t m_h, std::size_t m, std::size_t k,
                                    const Codebook& c, const SchemeChannels& ch,
                                    Substream& rng);

} // namespace secoord

#endif
