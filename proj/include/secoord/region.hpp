#ifndef SECOORD_REGION_HPP
#define SECOORD_REGION_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "secoord/prob.hpp"

namespace secoord {

// Canonical axis names shared across the library.
inline constexpr const char* kAxisD = "D";
inline constexpr const char* kAxisX = "X";
inline constexpr const char* kAxisY = "Y";
inline constexpr const char* kAxisW = "W";
inline constexpr const char* kAxisU = "U";
inline constexpr const char* kAxisV = "V";
inline constexpr const char* kAxisXhat = "Xhat";

/// Large negative stand-in for the -infinity entries of the lossless payoff.
inline constexpr double kLosslessSentinel = -1e9;

/// Per-symbol payoff pi(x, xhat, z). The system maximizes, the adversary
/// minimizes through z. When `log_loss` is set the adversary's action is a
/// belief over X and `z_axis` is ignored.
struct PayoffFn {
    std::string name;
    Alphabet x_axis;
    Alphabet xhat_axis;
    Alphabet z_axis;
    std::vector<double> table; // [x][xhat][z] row-major
    bool log_loss = false;

    double value(std::size_t x, std::size_t xhat, std::size_t z) const {
        return table[(x * xhat_axis.size() + xhat) * z_axis.size() + z];
    }
    double max_entry() const;

    /// pi = 1{x != z}; ignores the reconstruction.
    static PayoffFn hamming(const Alphabet& x, const Alphabet& xhat);
    /// pi = 1{x != z} when xhat = x, sentinel otherwise (secure lossless mode).
    static PayoffFn lossless_hamming(const Alphabet& x, const Alphabet& xhat);
    /// pi = -log2 z(x) against a belief-valued adversary.
    static PayoffFn log_loss_fn(const Alphabet& x, const Alphabet& xhat);
    /// Distortion table d(x, xhat) wrapped as a z-independent payoff.
    static PayoffFn distortion(const Alphabet& x, const Alphabet& xhat,
                               std::vector<double> d_table, std::string name = "distortion");
};

/// The source model: P_{XY} plus the disclosure channel.
///
/// In pair mode the disclosed variable is D = (X, Dx) with Dx drawn from X,
/// which is the setting where the region is tight. A general channel from
/// (X, Y) is accepted for simulation-only use.
struct SourceSpec {
    JointDist joint;    // axes {X, Y}
    Channel disclosure; // pair mode: {X} -> {Dx};  general mode: {X,Y} -> {D}
    bool pair_disclosure = true;
    std::vector<PayoffFn> payoffs;

    /// Joint over {D, X, Y} with the D alphabet expanded appropriately.
    JointDist source_joint() const;

    /// X uniform Bern(1/2)-style source with Y = X through a BSC and D = X.
    static SourceSpec binary_symmetric(double flip_y, std::vector<PayoffFn> payoffs);
};

/// A joint distribution over (D, X, Y, W, U, V, Xhat) proposed as a member of
/// the single-letter region.
struct SchemeDist {
    JointDist joint;

    const Alphabet& axis(const char* name) const { return joint.axis(name); }
};

struct RatePoint {
    double helper_rate = 0.0; // R_H
    double msg_rate = 0.0;    // R
    double key_rate = 0.0;    // R0
    std::vector<double> payoffs;
};

struct RateBudget {
    double helper_rate = std::numeric_limits<double>::infinity();
    double msg_rate = std::numeric_limits<double>::infinity();
    double key_rate = std::numeric_limits<double>::infinity();

    bool admits(const RatePoint& p, double tol = 1e-9) const {
        return p.helper_rate <= helper_rate + tol && p.msg_rate <= msg_rate + tol &&
               p.key_rate <= key_rate + tol;
    }
};

/// The three conditional factors that generate a scheme from a source:
/// W from Y, (U,V) jointly from (X,W), Xhat from (U,V,W). Composing them
/// satisfies both Markov chains by construction.
struct SchemeFactors {
    Channel w_given_y;
    Channel uv_given_xw;
    Channel xhat_given_uvw;
};

SchemeDist build_scheme(const JointDist& source_dxy, const SchemeFactors& f);

/// Named violations; empty means the scheme is admissible within tol.
std::vector<Violation> validate_scheme(const SchemeDist& q, const SourceSpec& src, double tol);

/// (I(Y;W), I(X;UV|W), I(D;V|U,W), payoff values). Pure computation; callers
/// that need the admissibility contract use rate_point_checked.
RatePoint rate_point(const SchemeDist& q, const std::vector<PayoffFn>& payoffs);
RatePoint rate_point_checked(const SchemeDist& q, const SourceSpec& src, double tol = 1e-6);

/// Converse pruning: rebuilds the joint as
///   Q_{Xhat,W,U,V} * Q_{X|W,U,V} * Q_{D,Y|X,W}
/// which satisfies the strong chain exactly while preserving the marginals
/// that the rate-payoff coordinates depend on.
SchemeDist prune(const SchemeDist& q);

/// H(X|W) - [I(X; Xhat,W) - key_rate]_+ in bits.
double equivocation_payoff(const SchemeDist& q, double key_rate);

/// Private-link specialization (U, V collapsed into Xhat):
/// (I(Y;W), I(X;Xhat|W), E d1, H(X|W)) with the last two in `payoffs`.
RatePoint private_link_point(const SchemeDist& q, const PayoffFn& d1);
/// Same without the secrecy coordinate.
RatePoint multiterminal_point(const SchemeDist& q, const PayoffFn& d1);

// ---------------------------------------------------------------------------
// Search over the region

struct SearchConfig {
    enum class Engine { grid, coordinate_ascent };
    Engine engine = Engine::coordinate_ascent;
    int cap_w = 4, cap_u = 4, cap_v = 4; // clipped to the loose cardinality bounds
    bool paper_caps = false;             // opt in to the loose bounds themselves
    int grid_resolution = 8;             // pmf entries on multiples of 1/resolution
    int restarts = 12;
    int max_iters = 80;
    double tol = 1e-7;
    std::uint64_t seed = 0;
    bool v_independent = true; // restrict coordinate ascent to V independent of (X,Y,D,W)
    std::size_t max_grid_candidates = 300'000'000;
};

struct SearchResult {
    SchemeDist scheme;
    RatePoint point;
    double payoff_value = 0.0;
    bool budget_feasible = false; // false => constant-action fallback returned
    std::string engine;
    std::uint64_t candidates_evaluated = 0;
};

/// Maximize payoff `payoff_index` over schemes whose rate point fits the
/// budget. Infeasible budgets return the best constant-action scheme.
SearchResult best_payoff(const SourceSpec& src, const RateBudget& budget,
                         std::size_t payoff_index, const SearchConfig& cfg);

/// Same search over many budgets; the grid engine shares one enumeration pass.
std::vector<SearchResult> best_payoff_lattice(const SourceSpec& src,
                                              const std::vector<RateBudget>& budgets,
                                              std::size_t payoff_index, const SearchConfig& cfg);

// ---------------------------------------------------------------------------
// Randomized instances (pruning checks, property tests)

struct SchemeSizes {
    std::size_t nx = 2, ny = 2, nd = 2, nw = 2, nu = 2, nv = 2, nxh = 2;
};

class Substream; // rng.hpp

/// Random seven-axis joint satisfying only the pruning premise: Xhat is
/// generated from (U,V,W) and the disclosure is attached through X.
SchemeDist random_weak_chain_scheme(const SchemeSizes& sz, Substream& rng);

/// Random admissible scheme: random conditional factors composed onto the
/// given (D,X,Y) source joint.
SchemeDist random_factor_scheme(const JointDist& source_dxy, const SchemeSizes& sz,
                                Substream& rng);

// Preset factor triples over a given source (binary anchors used throughout
// the tests and the CLI).
namespace presets {
/// W = Y public, U,V constant, Xhat = X.
SchemeFactors reveal_all(const SourceSpec& src);
/// W,U constant, V = Xhat = X (keeps X behind the key).
SchemeFactors one_time_pad(const SourceSpec& src);
/// W,V constant, U = Xhat = X.
SchemeFactors no_secrecy(const SourceSpec& src);
/// W,U constant, V uniform key digit, U' = X (+) V on the U layer, Xhat = U (+) V.
SchemeFactors xor_pad(const SourceSpec& src);
SchemeFactors by_name(const std::string& name, const SourceSpec& src);
} // namespace presets

} // namespace secoord

#endif
