#include "secoord/region.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "secoord/adversary.hpp"
#include "secoord/rng.hpp"

namespace secoord {

double PayoffFn::max_entry() const {
    double m = table.empty() ? 0.0 : table[0];
    for (double v : table) m = std::max(m, v);
    return m;
}

PayoffFn PayoffFn::hamming(const Alphabet& x, const Alphabet& xhat) {
    PayoffFn p;
    p.name = "hamming";
    p.x_axis = x;
    p.xhat_axis = xhat;
    p.z_axis = Alphabet{"Z", x.symbols};
    p.table.assign(x.size() * xhat.size() * x.size(), 0.0);
    for (std::size_t xi = 0; xi < x.size(); ++xi)
        for (std::size_t xh = 0; xh < xhat.size(); ++xh)
            for (std::size_t z = 0; z < x.size(); ++z)
                p.table[(xi * xhat.size() + xh) * x.size() + z] = (xi == z) ? 0.0 : 1.0;
    return p;
}

PayoffFn PayoffFn::lossless_hamming(const Alphabet& x, const Alphabet& xhat) {
    PayoffFn p = hamming(x, xhat);
    p.name = "lossless_hamming";
    if (xhat.symbols != x.symbols)
        throw config_error("lossless_hamming requires matching X and Xhat alphabets");
    for (std::size_t xi = 0; xi < x.size(); ++xi)
        for (std::size_t xh = 0; xh < xhat.size(); ++xh)
            for (std::size_t z = 0; z < x.size(); ++z)
                if (xi != xh)
                    p.table[(xi * xhat.size() + xh) * x.size() + z] = kLosslessSentinel;
    return p;
}

PayoffFn PayoffFn::log_loss_fn(const Alphabet& x, const Alphabet& xhat) {
    PayoffFn p;
    p.name = "log_loss";
    p.x_axis = x;
    p.xhat_axis = xhat;
    p.z_axis = Alphabet{"Z", {"belief"}};
    p.table.assign(x.size() * xhat.size(), 0.0);
    p.log_loss = true;
    return p;
}

PayoffFn PayoffFn::distortion(const Alphabet& x, const Alphabet& xhat,
                              std::vector<double> d_table, std::string name) {
    if (d_table.size() != x.size() * xhat.size())
        throw config_error("distortion table size mismatch");
    PayoffFn p;
    p.name = std::move(name);
    p.x_axis = x;
    p.xhat_axis = xhat;
    p.z_axis = Alphabet{"Z", {"-"}};
    p.table = std::move(d_table);
    return p;
}

JointDist SourceSpec::source_joint() const {
    if (!joint.has_axis(kAxisX) || !joint.has_axis(kAxisY))
        throw config_error("source joint must have axes X and Y");
    const Alphabet& ax = joint.axis(kAxisX);

    if (pair_disclosure) {
        if (disclosure.inputs().size() != 1 || disclosure.inputs()[0].name != kAxisX)
            throw config_error("pair disclosure channel must map X to Dx");
        const Alphabet& dx = disclosure.outputs()[0];
        Alphabet d_axis;
        d_axis.name = kAxisD;
        if (dx.size() == 1) {
            d_axis.symbols = ax.symbols; // D carries exactly X
        } else {
            for (const auto& xs : ax.symbols)
                for (const auto& ds : dx.symbols) d_axis.symbols.push_back(xs + "|" + ds);
        }
        const std::size_t nx = ax.size(), nd = dx.size();
        std::vector<double> t(nx * d_axis.size(), 0.0);
        for (std::size_t xi = 0; xi < nx; ++xi) {
            for (std::size_t di = 0; di < nd; ++di) {
                std::size_t dsym = (nd == 1) ? xi : xi * nd + di;
                t[xi * d_axis.size() + dsym] = disclosure.entry(xi, di);
            }
        }
        return compose(joint, Channel({ax}, {d_axis}, std::move(t)));
    }

    // General disclosure: channel from a subset of {X, Y} to axis D.
    for (const auto& in : disclosure.inputs())
        if (in.name != kAxisX && in.name != kAxisY)
            throw config_error("general disclosure inputs must be X and/or Y");
    if (disclosure.outputs().size() != 1 || disclosure.outputs()[0].name != kAxisD)
        throw config_error("general disclosure output axis must be named D");
    return compose(joint, disclosure);
}

SourceSpec SourceSpec::binary_symmetric(double flip_y, std::vector<PayoffFn> payoffs) {
    Alphabet x = Alphabet::indexed(kAxisX, 2);
    SourceSpec s;
    s.joint = compose(JointDist::pmf(x, {0.5, 0.5}), Channel::binary_symmetric(x, kAxisY, flip_y));
    s.disclosure = Channel({x}, {Alphabet{"Dx", {"-"}}}, {1.0, 1.0});
    s.pair_disclosure = true;
    s.payoffs = std::move(payoffs);
    return s;
}

SchemeDist build_scheme(const JointDist& source_dxy, const SchemeFactors& f) {
    JointDist j = compose(source_dxy, f.w_given_y);
    j = compose(j, f.uv_given_xw);
    j = compose(j, f.xhat_given_uvw);
    return SchemeDist{std::move(j)};
}

std::vector<Violation> validate_scheme(const SchemeDist& q, const SourceSpec& src, double tol) {
    std::vector<Violation> out;
    const JointDist& j = q.joint;
    for (const char* ax : {kAxisD, kAxisX, kAxisY, kAxisW, kAxisU, kAxisV, kAxisXhat})
        j.axis_pos(ax); // throws config_error if absent

    JointDist want = src.source_joint();
    JointDist got = marginal(j, {kAxisD, kAxisX, kAxisY});
    if (!(got.axes() == want.axes()))
        throw config_error("scheme (D,X,Y) alphabets do not match the source");
    double dev = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        dev = std::max(dev, std::abs(got.table()[i] - want.table()[i]));
    if (dev > tol) out.push_back({"source_marginal", dev});

    double d1 = markov_deviation(j, {kAxisW}, {kAxisY}, {kAxisX, kAxisD});
    if (d1 > tol) out.push_back({"chain_W-Y-XD", d1});

    double d2 = markov_deviation(j, {kAxisD, kAxisY}, {kAxisX, kAxisW}, {kAxisU, kAxisV});
    if (d2 > tol) out.push_back({"chain_DY-XW-UVW", d2});

    double d3 = markov_deviation(j, {kAxisD, kAxisX, kAxisY}, {kAxisU, kAxisV, kAxisW},
                                 {kAxisXhat});
    if (d3 > tol) out.push_back({"chain_DYXW-UVW-Xhat", d3});

    const double nx = static_cast<double>(j.axis(kAxisX).size());
    const double ny = static_cast<double>(j.axis(kAxisY).size());
    const double nw = static_cast<double>(j.axis(kAxisW).size());
    const double nu = static_cast<double>(j.axis(kAxisU).size());
    const double nxh = static_cast<double>(j.axis(kAxisXhat).size());
    double cap_w = nx * ny + 6.0;
    double cap_u = nx * ny * nw + 4.0;
    double cap_v = nx * ny * nw * nu * nxh + 2.0;
    if (nw > cap_w) out.push_back({"cardinality_W", nw - cap_w});
    if (nu > cap_u) out.push_back({"cardinality_U", nu - cap_u});
    if (static_cast<double>(j.axis(kAxisV).size()) > cap_v)
        out.push_back({"cardinality_V", static_cast<double>(j.axis(kAxisV).size()) - cap_v});
    return out;
}

RatePoint rate_point(const SchemeDist& q, const std::vector<PayoffFn>& payoffs) {
    RatePoint p;
    p.helper_rate = mutual_info(q.joint, {kAxisY}, {kAxisW});
    p.msg_rate = cond_mutual_info(q.joint, {kAxisX}, {kAxisU, kAxisV}, {kAxisW});
    p.key_rate = cond_mutual_info(q.joint, {kAxisD}, {kAxisV}, {kAxisU, kAxisW});
    p.payoffs.reserve(payoffs.size());
    for (const auto& pf : payoffs) {
        if (pf.log_loss) {
            p.payoffs.push_back(cond_entropy(q.joint, {kAxisX}, {kAxisU, kAxisW}));
        } else {
            p.payoffs.push_back(single_letter_best_response(q, pf).second);
        }
    }
    return p;
}

RatePoint rate_point_checked(const SchemeDist& q, const SourceSpec& src, double tol) {
    auto violations = validate_scheme(q, src, tol);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "scheme violates its constraints:";
        for (const auto& v : violations) os << " " << v.name << "(" << v.magnitude << ")";
        throw validation_error(os.str(), std::move(violations));
    }
    return rate_point(q, src.payoffs);
}

SchemeDist prune(const SchemeDist& q) {
    JointDist head = marginal(q.joint, {kAxisXhat, kAxisW, kAxisU, kAxisV});
    Channel x_given_wuv = conditional(q.joint, {kAxisX}, {kAxisW, kAxisU, kAxisV});
    Channel dy_given_xw = conditional(q.joint, {kAxisD, kAxisY}, {kAxisX, kAxisW});
    return SchemeDist{compose(compose(head, x_given_wuv), dy_given_xw)};
}

double equivocation_payoff(const SchemeDist& q, double key_rate) {
    double hxw = cond_entropy(q.joint, {kAxisX}, {kAxisW});
    double leak = mutual_info(q.joint, {kAxisX}, {kAxisXhat, kAxisW}) - key_rate;
    return hxw - std::max(0.0, leak);
}

namespace {

double expected_distortion(const SchemeDist& q, const PayoffFn& d1) {
    JointDist m = marginal(q.joint, {kAxisX, kAxisXhat});
    const std::size_t nxh = m.axis(kAxisXhat).size();
    const std::size_t pos_x = m.axis_pos(kAxisX);
    double e = 0.0;
    std::array<std::size_t, 2> digits{};
    for (std::size_t f = 0; f < m.size(); ++f) {
        m.digits_of(f, digits);
        std::size_t xi = digits[pos_x];
        std::size_t xh = digits[1 - pos_x];
        (void)nxh;
        e += m.table()[f] * d1.value(xi, xh, 0);
    }
    return e;
}

void require_private_link_chains(const SchemeDist& q) {
    std::vector<Violation> v;
    double d1 = markov_deviation(q.joint, {kAxisW}, {kAxisY}, {kAxisX});
    if (d1 > 1e-6) v.push_back({"chain_W-Y-X", d1});
    double d2 = markov_deviation(q.joint, {kAxisY}, {kAxisX, kAxisW}, {kAxisXhat});
    if (d2 > 1e-6) v.push_back({"chain_Y-XW-Xhat", d2});
    if (!v.empty()) throw validation_error("scheme violates the private-link chains", v);
}

} // namespace

RatePoint private_link_point(const SchemeDist& q, const PayoffFn& d1) {
    require_private_link_chains(q);
    RatePoint p;
    p.helper_rate = mutual_info(q.joint, {kAxisY}, {kAxisW});
    p.msg_rate = cond_mutual_info(q.joint, {kAxisX}, {kAxisXhat}, {kAxisW});
    p.key_rate = 0.0;
    p.payoffs = {expected_distortion(q, d1), cond_entropy(q.joint, {kAxisX}, {kAxisW})};
    return p;
}

RatePoint multiterminal_point(const SchemeDist& q, const PayoffFn& d1) {
    RatePoint p = private_link_point(q, d1);
    p.payoffs.pop_back();
    return p;
}

// ---------------------------------------------------------------------------
// Randomized instances

namespace {

std::vector<double> random_table(std::size_t n, Substream& rng) {
    std::vector<double> t(n);
    double total = 0.0;
    for (double& v : t) {
        v = -std::log(std::max(rng.uniform01(), 1e-300));
        total += v;
    }
    for (double& v : t) v /= total;
    return t;
}

Channel random_channel(std::vector<Alphabet> in, Alphabet out, Substream& rng) {
    std::size_t in_n = 1;
    for (const auto& a : in) in_n *= a.size();
    const std::size_t out_n = out.size();
    std::vector<double> t;
    t.reserve(in_n * out_n);
    for (std::size_t r = 0; r < in_n; ++r) {
        auto row = random_table(out_n, rng);
        t.insert(t.end(), row.begin(), row.end());
    }
    return Channel(std::move(in), {std::move(out)}, std::move(t));
}

} // namespace

SchemeDist random_weak_chain_scheme(const SchemeSizes& sz, Substream& rng) {
    Alphabet ax = Alphabet::indexed(kAxisX, sz.nx);
    Alphabet ay = Alphabet::indexed(kAxisY, sz.ny);
    Alphabet aw = Alphabet::indexed(kAxisW, sz.nw);
    Alphabet au = Alphabet::indexed(kAxisU, sz.nu);
    Alphabet av = Alphabet::indexed(kAxisV, sz.nv);
    Alphabet ad = Alphabet::indexed(kAxisD, sz.nd);
    Alphabet axh = Alphabet::indexed(kAxisXhat, sz.nxh);

    JointDist base({ax, ay, aw, au, av},
                   random_table(sz.nx * sz.ny * sz.nw * sz.nu * sz.nv, rng));
    JointDist with_d = compose(base, random_channel({ax}, ad, rng));
    JointDist full = compose(with_d, random_channel({au, av, aw}, axh, rng));
    return SchemeDist{std::move(full)};
}

SchemeDist random_factor_scheme(const JointDist& source_dxy, const SchemeSizes& sz,
                                Substream& rng) {
    const Alphabet& ax = source_dxy.axis(kAxisX);
    const Alphabet& ay = source_dxy.axis(kAxisY);
    Alphabet aw = Alphabet::indexed(kAxisW, sz.nw);
    Alphabet au = Alphabet::indexed(kAxisU, sz.nu);
    Alphabet av = Alphabet::indexed(kAxisV, sz.nv);
    Alphabet axh = Alphabet::indexed(kAxisXhat, sz.nxh);

    SchemeFactors f;
    f.w_given_y = random_channel({ay}, aw, rng);
    {
        // joint (U,V) rows: build as a two-output channel
        std::size_t in_n = ax.size() * aw.size();
        std::vector<double> t;
        t.reserve(in_n * sz.nu * sz.nv);
        for (std::size_t r = 0; r < in_n; ++r) {
            auto row = random_table(sz.nu * sz.nv, rng);
            t.insert(t.end(), row.begin(), row.end());
        }
        f.uv_given_xw = Channel({ax, aw}, {au, av}, std::move(t));
    }
    f.xhat_given_uvw = random_channel({au, av, aw}, axh, rng);
    return build_scheme(source_dxy, f);
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

namespace {

Alphabet singleton(const char* name) { return Alphabet{name, {"0"}}; }

Channel constant_channel(std::vector<Alphabet> inputs, Alphabet out) {
    std::size_t in_n = 1;
    for (const auto& a : inputs) in_n *= a.size();
    std::vector<double> t(in_n, 1.0);
    return Channel(std::move(inputs), {std::move(out)}, std::move(t));
}

} // namespace

SchemeFactors reveal_all(const SourceSpec& src) {
    const Alphabet& x = src.joint.axis(kAxisX);
    const Alphabet& y = src.joint.axis(kAxisY);
    Alphabet w{kAxisW, y.symbols};
    Alphabet u = singleton(kAxisU);
    Alphabet v = singleton(kAxisV);
    Alphabet xh{kAxisXhat, x.symbols};

    SchemeFactors f;
    f.w_given_y = Channel::identity(y, kAxisW);
    {
        // (u,v) constant regardless of (x,w)
        std::vector<double> t(x.size() * w.size(), 1.0);
        f.uv_given_xw = Channel({x, w}, {u, v}, std::move(t));
    }
    {
        // Xhat drawn from the X posterior given W (= given Y).
        Channel post = conditional(src.joint, {kAxisX}, {kAxisY});
        std::vector<double> t(u.size() * v.size() * w.size() * xh.size(), 0.0);
        // channel input canonical order is (U, V, W); only W varies
        for (std::size_t wi = 0; wi < w.size(); ++wi)
            for (std::size_t xi = 0; xi < xh.size(); ++xi)
                t[wi * xh.size() + xi] = post.entry(wi, xi);
        f.xhat_given_uvw = Channel({u, v, w}, {xh}, std::move(t));
    }
    return f;
}

SchemeFactors one_time_pad(const SourceSpec& src) {
    const Alphabet& x = src.joint.axis(kAxisX);
    const Alphabet& y = src.joint.axis(kAxisY);
    Alphabet w = singleton(kAxisW);
    Alphabet u = singleton(kAxisU);
    Alphabet v{kAxisV, x.symbols};
    Alphabet xh{kAxisXhat, x.symbols};

    SchemeFactors f;
    f.w_given_y = constant_channel({y}, w);
    {
        // v = x deterministically, u constant
        std::vector<double> t(x.size() * w.size() * v.size(), 0.0);
        for (std::size_t xi = 0; xi < x.size(); ++xi) t[xi * v.size() + xi] = 1.0;
        f.uv_given_xw = Channel({x, w}, {u, v}, std::move(t));
    }
    {
        // xhat = v
        std::vector<double> t(v.size() * xh.size(), 0.0);
        for (std::size_t vi = 0; vi < v.size(); ++vi) t[vi * xh.size() + vi] = 1.0;
        f.xhat_given_uvw = Channel({u, v, w}, {xh}, std::move(t));
    }
    return f;
}

SchemeFactors no_secrecy(const SourceSpec& src) {
    const Alphabet& x = src.joint.axis(kAxisX);
    const Alphabet& y = src.joint.axis(kAxisY);
    Alphabet w = singleton(kAxisW);
    Alphabet u{kAxisU, x.symbols};
    Alphabet v = singleton(kAxisV);
    Alphabet xh{kAxisXhat, x.symbols};

    SchemeFactors f;
    f.w_given_y = constant_channel({y}, w);
    {
        // u = x deterministically, v constant; output canonical order (U, V)
        std::vector<double> t(x.size() * u.size(), 0.0);
        for (std::size_t xi = 0; xi < x.size(); ++xi) t[xi * u.size() + xi] = 1.0;
        f.uv_given_xw = Channel({x, w}, {u, v}, std::move(t));
    }
    {
        std::vector<double> t(u.size() * xh.size(), 0.0);
        for (std::size_t ui = 0; ui < u.size(); ++ui) t[ui * xh.size() + ui] = 1.0;
        f.xhat_given_uvw = Channel({u, v, w}, {xh}, std::move(t));
    }
    return f;
}

SchemeFactors xor_pad(const SourceSpec& src) {
    const Alphabet& x = src.joint.axis(kAxisX);
    const Alphabet& y = src.joint.axis(kAxisY);
    const std::size_t k = x.size();
    Alphabet w = singleton(kAxisW);
    Alphabet u{kAxisU, x.symbols};
    Alphabet v{kAxisV, x.symbols};
    Alphabet xh{kAxisXhat, x.symbols};

    SchemeFactors f;
    f.w_given_y = constant_channel({y}, w);
    {
        // v uniform, u = (x + v) mod k; output canonical order (U, V)
        std::vector<double> t(k * (k * k), 0.0);
        for (std::size_t xi = 0; xi < k; ++xi)
            for (std::size_t vi = 0; vi < k; ++vi) {
                std::size_t ui = (xi + vi) % k;
                t[xi * (k * k) + ui * k + vi] = 1.0 / static_cast<double>(k);
            }
        f.uv_given_xw = Channel({x, w}, {u, v}, std::move(t));
    }
    {
        // xhat = (u - v) mod k; input canonical order (U, V, W)
        std::vector<double> t(k * k * k, 0.0);
        for (std::size_t ui = 0; ui < k; ++ui)
            for (std::size_t vi = 0; vi < k; ++vi) {
                std::size_t xi = (ui + k - vi) % k;
                t[(ui * k + vi) * k + xi] = 1.0;
            }
        f.xhat_given_uvw = Channel({u, v, w}, {xh}, std::move(t));
    }
    return f;
}

SchemeFactors by_name(const std::string& name, const SourceSpec& src) {
    if (name == "reveal_all") return reveal_all(src);
    if (name == "one_time_pad") return one_time_pad(src);
    if (name == "no_secrecy") return no_secrecy(src);
    if (name == "xor_pad") return xor_pad(src);
    throw config_error("unknown scheme preset '" + name + "'");
}

} // namespace presets

} // namespace secoord
