#include "secoord/json_io.hpp"

#include <cmath>

namespace secoord {

json to_json(const Alphabet& a) { return json{{"name", a.name}, {"symbols", a.symbols}}; }

json to_json(const JointDist& j) {
    json axes = json::array();
    for (const auto& a : j.axes()) axes.push_back(to_json(a));
    return json{{"axes", axes}, {"table", j.table()}};
}

json to_json(const Channel& c) {
    json in = json::array(), out = json::array();
    for (const auto& a : c.inputs()) in.push_back(to_json(a));
    for (const auto& a : c.outputs()) out.push_back(to_json(a));
    return json{{"inputs", in}, {"outputs", out}, {"table", c.table()}};
}

json to_json(const RatePoint& p) {
    return json{{"helper_rate", p.helper_rate},
                {"msg_rate", p.msg_rate},
                {"key_rate", p.key_rate},
                {"payoffs", p.payoffs}};
}

json to_json(const SingleLetterStrategy& s) {
    return json{{"nu", s.nu}, {"nw", s.nw}, {"z", s.z}};
}

json to_json(const BeliefStrategy& s) {
    return json{{"nu", s.nu}, {"nw", s.nw}, {"nx", s.nx}, {"beliefs", s.beliefs}};
}

json to_json(const std::vector<Violation>& v) {
    json out = json::array();
    for (const auto& item : v) out.push_back(json{{"name", item.name}, {"magnitude", item.magnitude}});
    return out;
}

json to_json(const SimReport& r) {
    json advs = json::array();
    for (const auto& a : r.adversaries) {
        json ja{{"name", a.name},
                {"payoff_mean", a.payoff_mean},
                {"payoff_stderr", a.payoff_stderr},
                {"min_symbol_payoff_mean", a.min_symbol_payoff_mean},
                {"profile_mean", a.profile_mean},
                {"profile_stderr", a.profile_stderr}};
        if (a.strategy) ja["strategy"] = to_json(*a.strategy);
        advs.push_back(std::move(ja));
    }
    json out{{"n", r.n},
             {"rates",
              {{"helper_rate", r.rates.helper_rate},
               {"msg_rate", r.rates.msg_rate},
               {"key_rate", r.rates.key_rate}}},
             {"episodes", r.episodes},
             {"seed", r.seed},
             {"adversaries", advs}};
    if (r.tv)
        out["tv"] = json{{"mean", r.tv->mean_tv}, {"per_codebook", r.tv->per_codebook_tv}};
    else
        out["tv"] = nullptr;
    return out;
}

json to_json(const PadReport& r) {
    return json{{"n", r.n},
                {"p", r.p},
                {"episodes", r.episodes},
                {"seed", r.seed},
                {"profile_mean", r.profile_mean},
                {"profile_stderr", r.profile_stderr},
                {"block_mean", r.block_mean},
                {"block_stderr", r.block_stderr},
                {"formula", r.formula}};
}

json to_json(const SearchResult& r) {
    return json{{"point", to_json(r.point)},
                {"payoff_value", r.payoff_value},
                {"budget_feasible", r.budget_feasible},
                {"engine", r.engine},
                {"candidates_evaluated", r.candidates_evaluated},
                {"scheme", to_json(r.scheme.joint)}};
}

const json& require_field(const json& j, const std::string& name) {
    if (!j.is_object() || !j.contains(name))
        throw config_error("missing config field '" + name + "'");
    return j.at(name);
}

double require_number(const json& j, const std::string& name) {
    const json& f = require_field(j, name);
    if (f.is_string()) {
        const std::string s = f.get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        throw config_error("field '" + name + "' must be a number");
    }
    if (!f.is_number()) throw config_error("field '" + name + "' must be a number");
    return f.get<double>();
}

std::uint64_t require_uint(const json& j, const std::string& name) {
    const json& f = require_field(j, name);
    if (!f.is_number_unsigned() && !(f.is_number_integer() && f.get<long long>() >= 0))
        throw config_error("field '" + name + "' must be a nonnegative integer");
    return f.get<std::uint64_t>();
}

Alphabet alphabet_from_json(const json& j) {
    Alphabet a;
    a.name = require_field(j, "name").get<std::string>();
    for (const auto& s : require_field(j, "symbols")) a.symbols.push_back(s.get<std::string>());
    return a;
}

JointDist joint_from_json(const json& j) {
    std::vector<Alphabet> axes;
    for (const auto& a : require_field(j, "axes")) axes.push_back(alphabet_from_json(a));
    std::vector<double> table = require_field(j, "table").get<std::vector<double>>();
    return JointDist(std::move(axes), std::move(table));
}

Channel channel_from_json(const json& j) {
    std::vector<Alphabet> in, out;
    for (const auto& a : require_field(j, "inputs")) in.push_back(alphabet_from_json(a));
    for (const auto& a : require_field(j, "outputs")) out.push_back(alphabet_from_json(a));
    std::vector<double> table = require_field(j, "table").get<std::vector<double>>();
    return Channel(std::move(in), std::move(out), std::move(table));
}

namespace {

std::vector<std::string> symbols_or_indexed(const json& cfg, const std::string& field,
                                            std::size_t k) {
    if (cfg.contains(field)) {
        std::vector<std::string> out;
        for (const auto& s : cfg.at(field)) out.push_back(s.get<std::string>());
        if (out.size() != k)
            throw config_error("field '" + field + "' size does not match the pmf");
        return out;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(std::to_string(i));
    return out;
}

std::vector<double> flatten_matrix(const json& m, const std::string& field) {
    if (!m.is_array() || m.empty() || !m[0].is_array())
        throw config_error("field '" + field + "' must be a matrix (array of rows)");
    std::vector<double> out;
    const std::size_t cols = m[0].size();
    for (const auto& row : m) {
        if (row.size() != cols) throw config_error("field '" + field + "' has ragged rows");
        for (const auto& v : row) out.push_back(v.get<double>());
    }
    return out;
}

} // namespace

SourceSpec source_from_json(const json& config) {
    const json& s = require_field(config, "source");
    SourceSpec spec;

    Alphabet ax, ay;
    if (s.contains("joint_xy")) {
        spec.joint = joint_from_json(s.at("joint_xy"));
        ax = spec.joint.axis(kAxisX);
        ay = spec.joint.axis(kAxisY);
    } else {
        std::vector<double> x_pmf = require_field(s, "x_pmf").get<std::vector<double>>();
        ax = Alphabet{kAxisX, symbols_or_indexed(s, "x_symbols", x_pmf.size())};
        std::vector<double> ytab = flatten_matrix(require_field(s, "y_given_x"), "y_given_x");
        const std::size_t ny = ytab.size() / x_pmf.size();
        ay = Alphabet{kAxisY, symbols_or_indexed(s, "y_symbols", ny)};
        spec.joint = compose(JointDist::pmf(ax, std::move(x_pmf)), Channel({ax}, {ay}, ytab));
    }

    const json& d = require_field(s, "disclosure");
    const std::string mode = require_field(d, "mode").get<std::string>();
    if (mode == "copy_x") {
        spec.pair_disclosure = true;
        spec.disclosure =
            Channel({ax}, {Alphabet{"Dx", {"-"}}}, std::vector<double>(ax.size(), 1.0));
    } else if (mode == "pair") {
        spec.pair_disclosure = true;
        std::vector<double> t = flatten_matrix(require_field(d, "dx_given_x"), "dx_given_x");
        const std::size_t ndx = t.size() / ax.size();
        Alphabet adx{"Dx", symbols_or_indexed(d, "dx_symbols", ndx)};
        spec.disclosure = Channel({ax}, {adx}, std::move(t));
    } else if (mode == "general") {
        spec.pair_disclosure = false;
        std::vector<double> t = flatten_matrix(require_field(d, "d_given_xy"), "d_given_xy");
        const std::size_t nd = t.size() / (ax.size() * ay.size());
        Alphabet ad{kAxisD, symbols_or_indexed(d, "d_symbols", nd)};
        // rows of d_given_xy follow the canonical (X, Y) order
        spec.disclosure = Channel({ax, ay}, {ad}, std::move(t));
    } else {
        throw config_error("disclosure mode '" + mode + "' unknown (copy_x|pair|general)");
    }

    const json& payoffs = require_field(config, "payoffs");
    if (!payoffs.is_array() || payoffs.empty())
        throw config_error("field 'payoffs' must be a non-empty array");
    for (const auto& p : payoffs) spec.payoffs.push_back(payoff_from_json(p, ax));
    return spec;
}

PayoffFn payoff_from_json(const json& j, const Alphabet& x) {
    const std::string type = require_field(j, "type").get<std::string>();
    Alphabet xhat{kAxisXhat, x.symbols};
    if (j.contains("xhat_symbols")) {
        xhat.symbols.clear();
        for (const auto& s : j.at("xhat_symbols")) xhat.symbols.push_back(s.get<std::string>());
    }
    if (type == "hamming") return PayoffFn::hamming(x, xhat);
    if (type == "lossless_hamming") return PayoffFn::lossless_hamming(x, xhat);
    if (type == "log_loss") return PayoffFn::log_loss_fn(x, xhat);
    if (type == "table") {
        PayoffFn p;
        p.name = j.value("name", "table");
        p.x_axis = x;
        p.xhat_axis = xhat;
        std::vector<std::string> zsyms;
        for (const auto& s : require_field(j, "z_symbols")) zsyms.push_back(s.get<std::string>());
        p.z_axis = Alphabet{"Z", zsyms};
        p.table = require_field(j, "table").get<std::vector<double>>();
        if (p.table.size() != x.size() * xhat.size() * p.z_axis.size())
            throw config_error("payoff 'table' size must be |X|*|Xhat|*|Z|");
        return p;
    }
    throw config_error("payoff type '" + type + "' unknown");
}

SchemeFactors factors_from_json(const json& j) {
    SchemeFactors f;
    f.w_given_y = channel_from_json(require_field(j, "w_given_y"));
    f.uv_given_xw = channel_from_json(require_field(j, "uv_given_xw"));
    f.xhat_given_uvw = channel_from_json(require_field(j, "xhat_given_uvw"));
    return f;
}

SchemeDist scheme_from_json(const json& config, const SourceSpec& src) {
    const json& s = require_field(config, "scheme");
    if (s.contains("preset")) {
        SchemeFactors f = presets::by_name(s.at("preset").get<std::string>(), src);
        return build_scheme(src.source_joint(), f);
    }
    if (s.contains("factors"))
        return build_scheme(src.source_joint(), factors_from_json(s.at("factors")));
    if (s.contains("joint")) return SchemeDist{joint_from_json(s.at("joint"))};
    throw config_error("field 'scheme' needs one of: preset, factors, joint");
}

RateBudget budget_from_json(const json& j) {
    RateBudget b;
    b.helper_rate = require_number(j, "helper_rate");
    b.msg_rate = require_number(j, "msg_rate");
    b.key_rate = require_number(j, "key_rate");
    return b;
}

Rates rates_from_json(const json& j) {
    Rates r;
    r.helper_rate = require_number(j, "helper_rate");
    r.msg_rate = require_number(j, "msg_rate");
    r.key_rate = require_number(j, "key_rate");
    if (r.helper_rate < 0 || r.msg_rate < 0 || r.key_rate < 0)
        throw config_error("field 'rates' entries must be >= 0");
    return r;
}

SearchConfig search_from_json(const json& j, std::uint64_t seed) {
    SearchConfig cfg;
    cfg.seed = seed;
    const std::string engine = j.value("engine", "coordinate_ascent");
    if (engine == "grid")
        cfg.engine = SearchConfig::Engine::grid;
    else if (engine == "coordinate_ascent")
        cfg.engine = SearchConfig::Engine::coordinate_ascent;
    else
        throw config_error("search engine '" + engine + "' unknown");
    if (j.contains("caps")) {
        const json& c = j.at("caps");
        cfg.cap_w = static_cast<int>(require_uint(c, "w"));
        cfg.cap_u = static_cast<int>(require_uint(c, "u"));
        cfg.cap_v = static_cast<int>(require_uint(c, "v"));
    }
    cfg.paper_caps = j.value("paper_caps", false);
    cfg.grid_resolution = j.value("resolution", cfg.grid_resolution);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.max_iters = j.value("max_iters", cfg.max_iters);
    cfg.tol = j.value("tol", cfg.tol);
    cfg.v_independent = j.value("v_independent", cfg.v_independent);
    if (j.contains("max_grid_candidates"))
        cfg.max_grid_candidates = require_uint(j, "max_grid_candidates");
    return cfg;
}

} // namespace secoord
