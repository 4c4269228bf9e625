#ifndef SECOORD_PAD_HPP
#define SECOORD_PAD_HPP

#include <cstdint>
#include <vector>

#include "secoord/common.hpp"

namespace secoord {

/// XOR source with private side information: X = Y (+) D with Y ~ Bern(p)^n
/// seen by the decoder and D ~ Bern(1/2)^n enumerated to the decoder through
/// a keyed random bijection per side-information sequence.
struct PadConfig {
    double p = 0.25;
    std::size_t n = 12;
    std::uint64_t seed = 0;
    std::size_t episodes = 2000;
    std::size_t max_n = 22; // posterior work is episodes * n * 2^n
};

struct PadReport {
    std::size_t n = 0;
    double p = 0.0;
    std::size_t episodes = 0;
    std::uint64_t seed = 0;
    std::vector<double> profile_mean;   // adversary mismatch rate per position
    std::vector<double> profile_stderr;
    double block_mean = 0.0;
    double block_stderr = 0.0;
    double formula = 0.0; // p + h(p) (1/2 - p)
};

/// Keyed pseudorandom bijection of {0,1}^bits (balanced Feistel network).
std::uint64_t feistel_permute(std::uint64_t value, unsigned bits, std::uint64_t key);
std::uint64_t feistel_invert(std::uint64_t value, unsigned bits, std::uint64_t key);

/// Simulate the scheme against the exact-posterior causal adversary. The
/// decoder reconstructs x^n exactly in every episode; the report carries the
/// Hamming payoff profile and block average.
PadReport pad_scheme(const PadConfig& cfg);

} // namespace secoord

#endif
