#ifndef SECOORD_PROB_HPP
#define SECOORD_PROB_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secoord/common.hpp"

namespace secoord {

/// A named finite axis: an ordered list of distinct symbol labels.
struct Alphabet {
    std::string name;
    std::vector<std::string> symbols;

    std::size_t size() const { return symbols.size(); }
    bool operator==(const Alphabet&) const = default;

    /// {"0", "1", ..., "k-1"}
    static Alphabet indexed(std::string name, std::size_t k);
};

/// Dense probability table over a set of named finite axes.
///
/// Axes are kept in canonical order (sorted by name) and the table is stored
/// in mixed-radix order with the last canonical axis varying fastest, so two
/// JointDists over the same axes are entry-wise comparable and serialized
/// reports are reproducible.
class JointDist {
  public:
    JointDist() = default;
    /// Accepts axes/table in any axis order; reorders to canonical form.
    /// Validates: non-negative entries, total mass 1 within 1e-12, size match.
    JointDist(std::vector<Alphabet> axes, std::vector<double> table);

    const std::vector<Alphabet>& axes() const { return axes_; }
    const std::vector<double>& table() const { return table_; }
    std::vector<double>& mutable_table() { return table_; }
    std::size_t size() const { return table_.size(); }

    bool has_axis(std::string_view name) const;
    std::size_t axis_pos(std::string_view name) const; // throws config_error
    const Alphabet& axis(std::string_view name) const;

    /// Flat index from per-axis digits (canonical order).
    std::size_t flat(std::span<const std::size_t> digits) const;
    void digits_of(std::size_t flat, std::span<std::size_t> out) const;
    std::size_t stride(std::size_t axis_pos) const { return strides_[axis_pos]; }

    static JointDist uniform(std::vector<Alphabet> axes);
    /// Single-axis pmf.
    static JointDist pmf(Alphabet axis, std::vector<double> probs);

  private:
    std::vector<Alphabet> axes_;
    std::vector<std::size_t> strides_;
    std::vector<double> table_;
    void build_strides();
};

/// Conditional probability table: rows are input tuples, columns output
/// tuples, each under its group's canonical axis order. Every row is a pmf.
class Channel {
  public:
    Channel() = default;
    Channel(std::vector<Alphabet> inputs, std::vector<Alphabet> outputs,
            std::vector<double> table);

    const std::vector<Alphabet>& inputs() const { return inputs_; }
    const std::vector<Alphabet>& outputs() const { return outputs_; }
    const std::vector<double>& table() const { return table_; }
    std::size_t in_size() const { return in_size_; }
    std::size_t out_size() const { return out_size_; }
    double entry(std::size_t in_flat, std::size_t out_flat) const {
        return table_[in_flat * out_size_ + out_flat];
    }

    /// Row-stochastic identity map (outputs mirror a single input axis).
    static Channel identity(const Alphabet& in, std::string out_name);
    /// Binary symmetric channel with the given flip probability.
    static Channel binary_symmetric(const Alphabet& in, std::string out_name, double flip);

  private:
    std::vector<Alphabet> inputs_;
    std::vector<Alphabet> outputs_;
    std::vector<double> table_;
    std::size_t in_size_ = 0, out_size_ = 0;
};

using AxisSet = std::vector<std::string>;

/// Sum out all axes not in `keep`.
JointDist marginal(const JointDist& j, const AxisSet& keep);

/// P(target | given). Rows conditioned on zero-probability events are set to
/// the uniform pmf so the channel stays total.
Channel conditional(const JointDist& j, const AxisSet& target, const AxisSet& given);

/// Extend a joint with the channel's fresh output axes; the marginal over the
/// original axes is unchanged.
JointDist compose(const JointDist& j, const Channel& ch);

/// Information measures in bits (base-2 logs, 0 log 0 = 0).
double entropy(const JointDist& j, const AxisSet& axes);
double cond_entropy(const JointDist& j, const AxisSet& target, const AxisSet& given);
double mutual_info(const JointDist& j, const AxisSet& a, const AxisSet& b);
double cond_mutual_info(const JointDist& j, const AxisSet& a, const AxisSet& b,
                        const AxisSet& c);

double binary_entropy(double p);

/// Half L1 distance between two joints over identical axes.
double total_variation(const JointDist& p, const JointDist& q);

/// True iff the A - B - C factorization holds within `tol` in max norm.
bool is_markov(const JointDist& j, const AxisSet& a, const AxisSet& b, const AxisSet& c,
               double tol);
/// Max-norm deviation from the A - B - C factorization.
double markov_deviation(const JointDist& j, const AxisSet& a, const AxisSet& b,
                        const AxisSet& c);

/// Compensated sum; keeps mass checks meaningful on large tables.
double stable_sum(std::span<const double> xs);

} // namespace secoord

#endif
