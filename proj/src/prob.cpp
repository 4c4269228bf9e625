#include "secoord/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace secoord {

namespace {

constexpr double kMassTol = 1e-12;

std::string join_names(const std::vector<Alphabet>& axes) {
    std::string s;
    for (const auto& a : axes) {
        if (!s.empty()) s += ",";
        s += a.name;
    }
    return s;
}

std::vector<std::size_t> strides_for(const std::vector<Alphabet>& axes) {
    std::vector<std::size_t> st(axes.size(), 1);
    for (std::size_t i = axes.size(); i-- > 1;) st[i - 1] = st[i] * axes[i].size();
    return st;
}

std::size_t total_size(const std::vector<Alphabet>& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.size();
    return n;
}

void check_axes(const std::vector<Alphabet>& axes) {
    std::set<std::string> names;
    for (const auto& a : axes) {
        if (a.symbols.empty())
            throw config_error("alphabet '" + a.name + "' is empty");
        std::set<std::string> syms(a.symbols.begin(), a.symbols.end());
        if (syms.size() != a.symbols.size())
            throw config_error("alphabet '" + a.name + "' has duplicate symbols");
        if (!names.insert(a.name).second)
            throw config_error("duplicate axis name '" + a.name + "'");
    }
}

// Permutation sorting axes by name; stable so equal names (already rejected)
// cannot reorder.
std::vector<std::size_t> canonical_order(const std::vector<Alphabet>& axes) {
    std::vector<std::size_t> order(axes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return axes[a].name < axes[b].name; });
    return order;
}

std::vector<double> reorder_table(const std::vector<Alphabet>& old_axes,
                                  const std::vector<double>& old_table,
                                  const std::vector<std::size_t>& order) {
    bool already = true;
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] != i) already = false;
    if (already) return old_table;

    const auto old_st = strides_for(old_axes);
    std::vector<Alphabet> new_axes;
    new_axes.reserve(order.size());
    for (std::size_t o : order) new_axes.push_back(old_axes[o]);
    const auto new_st = strides_for(new_axes);

    std::vector<double> out(old_table.size());
    std::vector<std::size_t> digits(order.size(), 0);
    for (std::size_t nf = 0; nf < out.size(); ++nf) {
        std::size_t rem = nf, of = 0;
        for (std::size_t i = 0; i < new_axes.size(); ++i) {
            std::size_t d = rem / new_st[i];
            rem %= new_st[i];
            of += d * old_st[order[i]];
        }
        out[nf] = old_table[of];
    }
    return out;
}

} // namespace

double stable_sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

Alphabet Alphabet::indexed(std::string name, std::size_t k) {
    Alphabet a;
    a.name = std::move(name);
    a.symbols.reserve(k);
    for (std::size_t i = 0; i < k; ++i) a.symbols.push_back(std::to_string(i));
    return a;
}

void JointDist::build_strides() { strides_ = strides_for(axes_); }

JointDist::JointDist(std::vector<Alphabet> axes, std::vector<double> table) {
    check_axes(axes);
    if (table.size() != total_size(axes)) {
        std::ostringstream os;
        os << "table size " << table.size() << " does not match axes (" << join_names(axes)
           << ") product " << total_size(axes);
        throw config_error(os.str());
    }
    const auto order = canonical_order(axes);
    table_ = reorder_table(axes, table, order);
    axes_.reserve(axes.size());
    for (std::size_t o : order) axes_.push_back(axes[o]);
    build_strides();

    for (double v : table_)
        if (!(v >= 0.0)) throw config_error("negative or non-finite probability entry");
    const double mass = stable_sum(table_);
    if (std::abs(mass - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "probability table mass " << mass << " differs from 1 beyond tolerance";
        throw config_error(os.str());
    }
}

bool JointDist::has_axis(std::string_view name) const {
    for (const auto& a : axes_)
        if (a.name == name) return true;
    return false;
}

std::size_t JointDist::axis_pos(std::string_view name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    throw config_error("unknown axis '" + std::string(name) + "' (have: " + join_names(axes_) +
                       ")");
}

const Alphabet& JointDist::axis(std::string_view name) const { return axes_[axis_pos(name)]; }

std::size_t JointDist::flat(std::span<const std::size_t> digits) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < axes_.size(); ++i) f += digits[i] * strides_[i];
    return f;
}

void JointDist::digits_of(std::size_t flat, std::span<std::size_t> out) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        out[i] = flat / strides_[i];
        flat %= strides_[i];
    }
}

JointDist JointDist::uniform(std::vector<Alphabet> axes) {
    const std::size_t n = total_size(axes);
    return JointDist(std::move(axes), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointDist JointDist::pmf(Alphabet axis, std::vector<double> probs) {
    return JointDist({std::move(axis)}, std::move(probs));
}

Channel::Channel(std::vector<Alphabet> inputs, std::vector<Alphabet> outputs,
                 std::vector<double> table) {
    check_axes(inputs);
    check_axes(outputs);
    {
        std::set<std::string> in_names;
        for (const auto& a : inputs) in_names.insert(a.name);
        for (const auto& a : outputs)
            if (in_names.count(a.name))
                throw config_error("channel axis '" + a.name + "' is both input and output");
    }
    const auto in_order = canonical_order(inputs);
    const auto out_order = canonical_order(outputs);

    in_size_ = total_size(inputs);
    out_size_ = total_size(outputs);
    if (table.size() != in_size_ * out_size_)
        throw config_error("channel table size does not match input/output axes");

    // Reorder rows and columns to canonical axis order.
    std::vector<Alphabet> in_sorted, out_sorted;
    for (std::size_t o : in_order) in_sorted.push_back(inputs[o]);
    for (std::size_t o : out_order) out_sorted.push_back(outputs[o]);

    const auto old_in_st = strides_for(inputs);
    const auto new_in_st = strides_for(in_sorted);
    const auto old_out_st = strides_for(outputs);
    const auto new_out_st = strides_for(out_sorted);

    table_.assign(table.size(), 0.0);
    for (std::size_t r = 0; r < in_size_; ++r) {
        std::size_t rem = r, old_r = 0;
        for (std::size_t i = 0; i < in_sorted.size(); ++i) {
            std::size_t d = rem / new_in_st[i];
            rem %= new_in_st[i];
            old_r += d * old_in_st[in_order[i]];
        }
        for (std::size_t cidx = 0; cidx < out_size_; ++cidx) {
            std::size_t crem = cidx, old_c = 0;
            for (std::size_t i = 0; i < out_sorted.size(); ++i) {
                std::size_t d = crem / new_out_st[i];
                crem %= new_out_st[i];
                old_c += d * old_out_st[out_order[i]];
            }
            table_[r * out_size_ + cidx] = table[old_r * out_size_ + old_c];
        }
    }
    inputs_ = std::move(in_sorted);
    outputs_ = std::move(out_sorted);

    for (std::size_t r = 0; r < in_size_; ++r) {
        double mass = stable_sum(std::span(table_).subspan(r * out_size_, out_size_));
        for (std::size_t c = 0; c < out_size_; ++c)
            if (!(table_[r * out_size_ + c] >= 0.0))
                throw config_error("negative or non-finite channel entry");
        if (std::abs(mass - 1.0) > 1e-9)
            throw config_error("channel row " + std::to_string(r) + " mass " +
                               std::to_string(mass) + " is not a pmf");
    }
}

Channel Channel::identity(const Alphabet& in, std::string out_name) {
    Alphabet out{std::move(out_name), in.symbols};
    const std::size_t k = in.size();
    std::vector<double> t(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) t[i * k + i] = 1.0;
    return Channel({in}, {out}, std::move(t));
}

Channel Channel::binary_symmetric(const Alphabet& in, std::string out_name, double flip) {
    if (in.size() != 2) throw config_error("binary_symmetric needs a binary input alphabet");
    if (!(flip >= 0.0 && flip <= 1.0)) throw config_error("flip probability outside [0,1]");
    Alphabet out{std::move(out_name), in.symbols};
    return Channel({in}, {out}, {1.0 - flip, flip, flip, 1.0 - flip});
}

namespace {

// Positions of the named axes inside j (canonical positions).
std::vector<std::size_t> axis_positions(const JointDist& j, const AxisSet& names) {
    std::vector<std::size_t> pos;
    pos.reserve(names.size());
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (!seen.insert(n).second) throw config_error("axis '" + n + "' listed twice");
        pos.push_back(j.axis_pos(n));
    }
    return pos;
}

AxisSet union_of(const AxisSet& a, const AxisSet& b) {
    AxisSet u = a;
    for (const auto& n : b)
        if (std::find(u.begin(), u.end(), n) == u.end()) u.push_back(n);
    return u;
}

void require_disjoint(const AxisSet& a, const AxisSet& b, const char* what) {
    for (const auto& n : a)
        for (const auto& m : b)
            if (n == m) throw config_error(std::string(what) + ": axis '" + n + "' overlaps");
}

double entropy_of_table(std::span<const double> t) {
    double h = 0.0;
    for (double p : t)
        if (p > 0.0) h -= p * std::log2(p);
    return h < 0.0 ? 0.0 : h;
}

} // namespace

JointDist marginal(const JointDist& j, const AxisSet& keep) {
    const auto keep_pos = axis_positions(j, keep);

    std::vector<Alphabet> kept_axes;
    kept_axes.reserve(keep_pos.size());
    for (auto p : keep_pos) kept_axes.push_back(j.axes()[p]);
    // Accumulate in the result's canonical layout directly.
    std::vector<std::size_t> order(keep_pos.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return kept_axes[a].name < kept_axes[b].name;
    });

    std::vector<Alphabet> out_axes;
    std::vector<std::size_t> src_pos;
    for (auto o : order) {
        out_axes.push_back(kept_axes[o]);
        src_pos.push_back(keep_pos[o]);
    }
    std::size_t out_n = 1;
    for (const auto& a : out_axes) out_n *= a.size();
    std::vector<std::size_t> out_strides(out_axes.size(), 1);
    for (std::size_t i = out_axes.size(); i-- > 1;)
        out_strides[i - 1] = out_strides[i] * out_axes[i].size();

    std::vector<double> acc(out_n, 0.0);
    const auto& t = j.table();
    std::vector<std::size_t> digits(j.axes().size());
    for (std::size_t f = 0; f < t.size(); ++f) {
        j.digits_of(f, digits);
        std::size_t of = 0;
        for (std::size_t i = 0; i < src_pos.size(); ++i) of += digits[src_pos[i]] * out_strides[i];
        acc[of] += t[f];
    }
    return JointDist(std::move(out_axes), std::move(acc));
}

Channel conditional(const JointDist& j, const AxisSet& target, const AxisSet& given) {
    require_disjoint(target, given, "conditional");
    JointDist sub = marginal(j, union_of(target, given));

    std::vector<Alphabet> in_axes, out_axes;
    for (const auto& n : given) in_axes.push_back(sub.axis(n));
    for (const auto& n : target) out_axes.push_back(sub.axis(n));

    // canonical orders within each group
    std::sort(in_axes.begin(), in_axes.end(),
              [](const Alphabet& a, const Alphabet& b) { return a.name < b.name; });
    std::sort(out_axes.begin(), out_axes.end(),
              [](const Alphabet& a, const Alphabet& b) { return a.name < b.name; });

    std::size_t in_n = 1, out_n = 1;
    for (const auto& a : in_axes) in_n *= a.size();
    for (const auto& a : out_axes) out_n *= a.size();

    std::vector<std::size_t> in_strides(in_axes.size(), 1), out_strides(out_axes.size(), 1);
    for (std::size_t i = in_axes.size(); i-- > 1;)
        in_strides[i - 1] = in_strides[i] * in_axes[i].size();
    for (std::size_t i = out_axes.size(); i-- > 1;)
        out_strides[i - 1] = out_strides[i] * out_axes[i].size();

    std::vector<std::size_t> in_pos, out_pos;
    for (const auto& a : in_axes) in_pos.push_back(sub.axis_pos(a.name));
    for (const auto& a : out_axes) out_pos.push_back(sub.axis_pos(a.name));

    std::vector<double> joint_rows(in_n * out_n, 0.0);
    std::vector<std::size_t> digits(sub.axes().size());
    for (std::size_t f = 0; f < sub.size(); ++f) {
        sub.digits_of(f, digits);
        std::size_t r = 0, c = 0;
        for (std::size_t i = 0; i < in_pos.size(); ++i) r += digits[in_pos[i]] * in_strides[i];
        for (std::size_t i = 0; i < out_pos.size(); ++i) c += digits[out_pos[i]] * out_strides[i];
        joint_rows[r * out_n + c] += sub.table()[f];
    }
    for (std::size_t r = 0; r < in_n; ++r) {
        auto row = std::span(joint_rows).subspan(r * out_n, out_n);
        double mass = stable_sum(row);
        if (mass > 0.0) {
            for (double& v : row) v /= mass;
        } else {
            // zero-probability conditioning event: uniform row keeps the
            // channel total
            for (double& v : row) v = 1.0 / static_cast<double>(out_n);
        }
    }
    return Channel(std::move(in_axes), std::move(out_axes), std::move(joint_rows));
}

JointDist compose(const JointDist& j, const Channel& ch) {
    for (const auto& a : ch.inputs()) {
        if (!j.has_axis(a.name))
            throw config_error("compose: channel input axis '" + a.name + "' missing from joint");
        if (!(j.axis(a.name) == a))
            throw config_error("compose: axis '" + a.name + "' symbol mismatch");
    }
    for (const auto& a : ch.outputs())
        if (j.has_axis(a.name))
            throw config_error("compose: output axis '" + a.name + "' collides with joint");

    std::vector<Alphabet> all_axes = j.axes();
    for (const auto& a : ch.outputs()) all_axes.push_back(a);

    std::size_t total = j.size() * ch.out_size();
    std::vector<double> out(total, 0.0);

    // Strides of result in (j axes..., ch output axes...) order; the
    // JointDist constructor re-canonicalizes afterwards.
    std::vector<std::size_t> ch_in_strides(ch.inputs().size());
    for (std::size_t i = 0; i < ch.inputs().size(); ++i) {
        std::size_t s = 1;
        for (std::size_t k = i + 1; k < ch.inputs().size(); ++k) s *= ch.inputs()[k].size();
        ch_in_strides[i] = s;
    }
    std::vector<std::size_t> in_pos;
    for (const auto& a : ch.inputs()) in_pos.push_back(j.axis_pos(a.name));

    std::vector<std::size_t> digits(j.axes().size());
    for (std::size_t f = 0; f < j.size(); ++f) {
        const double pj = j.table()[f];
        j.digits_of(f, digits);
        std::size_t row = 0;
        for (std::size_t i = 0; i < in_pos.size(); ++i) row += digits[in_pos[i]] * ch_in_strides[i];
        const std::size_t base = f * ch.out_size();
        for (std::size_t c = 0; c < ch.out_size(); ++c) out[base + c] = pj * ch.entry(row, c);
    }
    return JointDist(std::move(all_axes), std::move(out));
}

double entropy(const JointDist& j, const AxisSet& axes) {
    if (axes.size() == j.axes().size()) {
        bool all = true;
        for (const auto& n : axes)
            if (!j.has_axis(n)) all = false;
        if (all) return entropy_of_table(j.table());
    }
    return entropy_of_table(marginal(j, axes).table());
}

double cond_entropy(const JointDist& j, const AxisSet& target, const AxisSet& given) {
    require_disjoint(target, given, "cond_entropy");
    if (given.empty()) return entropy(j, target);
    double h = entropy(j, union_of(target, given)) - entropy(j, given);
    return h < 0.0 ? 0.0 : h;
}

double mutual_info(const JointDist& j, const AxisSet& a, const AxisSet& b) {
    require_disjoint(a, b, "mutual_info");
    double v = entropy(j, a) + entropy(j, b) - entropy(j, union_of(a, b));
    return v < 0.0 ? 0.0 : v;
}

double cond_mutual_info(const JointDist& j, const AxisSet& a, const AxisSet& b,
                        const AxisSet& c) {
    require_disjoint(a, b, "cond_mutual_info");
    if (c.empty()) return mutual_info(j, a, b);
    require_disjoint(a, c, "cond_mutual_info");
    require_disjoint(b, c, "cond_mutual_info");
    double v = entropy(j, union_of(a, c)) + entropy(j, union_of(b, c)) - entropy(j, c) -
               entropy(j, union_of(union_of(a, b), c));
    return v < 0.0 ? 0.0 : v;
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw config_error("binary_entropy argument outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double total_variation(const JointDist& p, const JointDist& q) {
    if (p.axes() != q.axes())
        throw config_error("total_variation: distributions have different axes");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.table()[i] - q.table()[i]);
    return 0.5 * s;
}

double markov_deviation(const JointDist& j, const AxisSet& a, const AxisSet& b,
                        const AxisSet& c) {
    require_disjoint(a, b, "is_markov");
    require_disjoint(b, c, "is_markov");
    require_disjoint(a, c, "is_markov");
    JointDist restricted = marginal(j, union_of(union_of(a, b), c));
    JointDist factored = compose(marginal(restricted, union_of(a, b)),
                                 conditional(restricted, c, b));
    double dev = 0.0;
    for (std::size_t i = 0; i < restricted.size(); ++i)
        dev = std::max(dev, std::abs(restricted.table()[i] - factored.table()[i]));
    return dev;
}

bool is_markov(const JointDist& j, const AxisSet& a, const AxisSet& b, const AxisSet& c,
               double tol) {
    return markov_deviation(j, a, b, c) <= tol;
}

} // namespace secoord
