#ifndef SECOORD_RNG_HPP
#define SECOORD_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <span>

#include "secoord/common.hpp"

namespace secoord {

// Counter-based generator: every stochastic role derives its own substream
// from (master seed, path). Substreams are independent of thread scheduling,
// so parallel and serial runs draw identical values.

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum class Role : std::uint64_t {
    Source = 1,
    Helper = 2,
    Alice = 3,
    Bob = 4,
    Key = 5,
    Adversary = 6,
    Codebook = 7,
    Search = 8,
    Pad = 9,
};

class Substream {
  public:
    Substream() = default;
    explicit Substream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Index drawn proportionally to the (nonnegative) weights. An all-zero
    /// weight vector falls back to a uniform draw.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) {
            return static_cast<std::size_t>(uniform01() * static_cast<double>(weights.size())) %
                   weights.size();
        }
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

inline Substream derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix64(master ^ 0x5ec00d5ec00dULL);
    for (std::uint64_t p : path) k = mix64(k ^ mix64(p + 0x100001b3ULL));
    return Substream(k);
}

inline Substream derive_stream(std::uint64_t master, Role role, std::uint64_t episode = 0) {
    return derive_stream(master, {static_cast<std::uint64_t>(role), episode});
}

} // namespace secoord

#endif
