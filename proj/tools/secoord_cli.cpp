#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "secoord/json_io.hpp"
#include "secoord/pad.hpp"
#include "secoord/prob.hpp"
#include "secoord/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using secoord::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw secoord::config_error("cannot open output path '" + path + "'");
    out << text;
}

json load_config(const std::string& path) {
    if (path.empty()) throw secoord::config_error("missing required flag '--config'");
    std::ifstream in(path);
    if (!in) throw secoord::config_error("cannot open config file '" + path + "'");
    return json::parse(in);
}

std::uint64_t resolve_seed(const json& config, bool seed_set, std::uint64_t flag_seed) {
    if (seed_set) return flag_seed;
    if (!config.contains("seed"))
        throw secoord::config_error("field 'seed' is required (no entropy defaults)");
    return secoord::require_uint(config, "seed");
}

struct Outputs {
    std::string report_path;
    std::string csv_path;
};

void emit_report(const std::string& command, const json& resolved, const json& results,
                 const Outputs& out) {
    json report{{"schema_version", 1},
                {"command", command},
                {"config", resolved},
                {"results", results}};
    write_text(out.report_path, report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

int cmd_region_point(const json& config, std::uint64_t seed, const Outputs& out) {
    secoord::SourceSpec src = secoord::source_from_json(config);
    secoord::SchemeDist scheme = secoord::scheme_from_json(config, src);
    const double tol = config.value("tol", 1e-6);

    auto violations = secoord::validate_scheme(scheme, src, tol);
    json results;
    results["violations"] = secoord::to_json(violations);
    results["valid"] = violations.empty();
    results["rate_point"] =
        violations.empty() ? secoord::to_json(secoord::rate_point(scheme, src.payoffs)) : json();

    json resolved = config;
    resolved["seed"] = seed;
    resolved["tol"] = tol;
    emit_report("region-point", resolved, results, out);
    return 0;
}

int cmd_region_search(const json& config, std::uint64_t seed, const Outputs& out) {
    secoord::SourceSpec src = secoord::source_from_json(config);
    const std::size_t payoff_index = config.value("payoff_index", 0);
    secoord::SearchConfig cfg =
        secoord::search_from_json(config.value("search", json::object()), seed);

    std::vector<secoord::RateBudget> budgets;
    if (config.contains("budget_lattice")) {
        const json& lat = config.at("budget_lattice");
        auto axis = [&](const char* name) {
            std::vector<double> v;
            for (const auto& x : secoord::require_field(lat, name))
                v.push_back(x.is_string() ? std::numeric_limits<double>::infinity()
                                          : x.get<double>());
            return v;
        };
        for (double h : axis("helper_rate"))
            for (double r : axis("msg_rate"))
                for (double k : axis("key_rate")) {
                    secoord::RateBudget b;
                    b.helper_rate = h;
                    b.msg_rate = r;
                    b.key_rate = k;
                    budgets.push_back(b);
                }
    } else {
        budgets.push_back(secoord::budget_from_json(secoord::require_field(config, "budget")));
    }

    auto results = secoord::best_payoff_lattice(src, budgets, payoff_index, cfg);

    json jres = json::array();
    std::ostringstream csv;
    csv << "budget_helper,budget_msg,budget_key,helper_rate,msg_rate,key_rate";
    for (std::size_t p = 0; p < src.payoffs.size(); ++p) csv << ",payoff" << p;
    csv << ",feasible\n";
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        json jr = secoord::to_json(results[i]);
        jr["budget"] = json{{"helper_rate", budgets[i].helper_rate},
                            {"msg_rate", budgets[i].msg_rate},
                            {"key_rate", budgets[i].key_rate}};
        jres.push_back(std::move(jr));
        csv << format_double(budgets[i].helper_rate) << ','
            << format_double(budgets[i].msg_rate) << ',' << format_double(budgets[i].key_rate)
            << ',' << format_double(results[i].point.helper_rate) << ','
            << format_double(results[i].point.msg_rate) << ','
            << format_double(results[i].point.key_rate);
        for (double v : results[i].point.payoffs) csv << ',' << format_double(v);
        csv << ',' << (results[i].budget_feasible ? 1 : 0) << '\n';
    }
    if (!out.csv_path.empty()) write_text(out.csv_path, csv.str());

    json resolved = config;
    resolved["seed"] = seed;
    resolved["payoff_index"] = payoff_index;
    emit_report("region-search", resolved, json{{"points", jres}}, out);
    return 0;
}

int cmd_simulate(const json& config, std::uint64_t seed, const Outputs& out) {
    secoord::SourceSpec src = secoord::source_from_json(config);
    secoord::SchemeDist scheme = secoord::scheme_from_json(config, src);
    const std::size_t n = secoord::require_uint(config, "n");
    if (n < 1) throw secoord::config_error("field 'n' must be >= 1");
    const std::size_t episodes = secoord::require_uint(config, "episodes");
    if (episodes < 1) throw secoord::config_error("field 'episodes' must be >= 1");
    secoord::Rates rates = secoord::rates_from_json(secoord::require_field(config, "rates"));

    std::vector<std::string> adversaries;
    if (config.contains("adversaries")) {
        for (const auto& a : config.at("adversaries")) adversaries.push_back(a.get<std::string>());
    } else if (config.contains("adversary")) {
        adversaries.push_back(
            secoord::require_field(config.at("adversary"), "type").get<std::string>());
    } else {
        throw secoord::config_error("missing config field 'adversary'");
    }

    secoord::SimBudgets budgets;
    if (config.contains("budgets")) {
        const json& b = config.at("budgets");
        budgets.codebook_symbols = b.value("codebook_symbols", budgets.codebook_symbols);
        budgets.posterior_states = b.value("posterior_states", budgets.posterior_states);
        budgets.enumeration = b.value("enumeration", budgets.enumeration);
    }
    const bool with_tv = config.value("with_tv", false);
    const std::size_t tv_codebooks = config.value("tv_codebooks", 5);

    secoord::SimReport rep = secoord::monte_carlo(src, scheme, n, rates, adversaries, episodes,
                                                  seed, budgets, with_tv, tv_codebooks);

    if (!out.csv_path.empty()) {
        std::ostringstream csv;
        csv << "adversary,payoff,i,mean_payoff,stderr\n";
        for (const auto& a : rep.adversaries)
            for (std::size_t p = 0; p < a.profile_mean.size(); ++p)
                for (std::size_t i = 0; i < a.profile_mean[p].size(); ++i)
                    csv << a.name << ',' << p << ',' << (i + 1) << ','
                        << format_double(a.profile_mean[p][i]) << ','
                        << format_double(a.profile_stderr[p][i]) << '\n';
        write_text(out.csv_path, csv.str());
    }

    json resolved = config;
    resolved["seed"] = seed;
    resolved["with_tv"] = with_tv;
    resolved["tv_codebooks"] = tv_codebooks;
    emit_report("simulate", resolved, secoord::to_json(rep), out);
    return 0;
}

int cmd_softcover(const json& config, std::uint64_t seed, const Outputs& out) {
    std::vector<double> p_u = secoord::require_field(config, "p_u").get<std::vector<double>>();
    secoord::Alphabet au{"U", {}};
    for (std::size_t i = 0; i < p_u.size(); ++i) au.symbols.push_back(std::to_string(i));
    secoord::JointDist pu = secoord::JointDist::pmf(au, p_u);

    const json& chan = secoord::require_field(config, "channel");
    std::vector<double> flat;
    for (const auto& row : chan)
        for (const auto& v : row) flat.push_back(v.get<double>());
    const std::size_t nx = flat.size() / p_u.size();
    secoord::Alphabet ax{"Xc", {}};
    for (std::size_t i = 0; i < nx; ++i) ax.symbols.push_back(std::to_string(i));
    secoord::Channel ch({au}, {ax}, flat);

    const double rate = secoord::require_number(config, "rate");
    const std::size_t num_codebooks = secoord::require_uint(config, "num_codebooks");
    std::vector<std::size_t> n_list;
    if (config.contains("n_list")) {
        for (const auto& v : config.at("n_list")) n_list.push_back(v.get<std::size_t>());
    } else {
        n_list.push_back(secoord::require_uint(config, "n"));
    }
    const std::size_t budget = config.value("enumeration_budget", std::size_t{100'000'000});

    json tvs = json::array();
    for (std::size_t n : n_list) {
        double tv = secoord::soft_cover_tv(pu, ch, rate, n, num_codebooks, seed, budget);
        tvs.push_back(json{{"n", n}, {"mean_tv", tv}});
    }

    json resolved = config;
    resolved["seed"] = seed;
    emit_report("softcover", resolved, json{{"tvs", tvs}}, out);
    return 0;
}

int cmd_pad_example(const json& config, std::uint64_t seed, const Outputs& out, double flag_p,
                    bool p_set, std::uint64_t flag_n, bool n_set) {
    secoord::PadConfig cfg;
    cfg.seed = seed;
    cfg.p = p_set ? flag_p : secoord::require_number(config, "p");
    cfg.n = n_set ? flag_n : secoord::require_uint(config, "n");
    cfg.episodes = config.value("episodes", cfg.episodes);
    cfg.max_n = config.value("max_n", cfg.max_n);

    secoord::PadReport rep = secoord::pad_scheme(cfg);

    if (!out.csv_path.empty()) {
        std::ostringstream csv;
        csv << "i,mean_payoff,stderr\n";
        for (std::size_t i = 0; i < rep.profile_mean.size(); ++i)
            csv << (i + 1) << ',' << format_double(rep.profile_mean[i]) << ','
                << format_double(rep.profile_stderr[i]) << '\n';
        write_text(out.csv_path, csv.str());
    }

    json resolved = config;
    resolved["seed"] = seed;
    resolved["p"] = cfg.p;
    resolved["n"] = cfg.n;
    resolved["episodes"] = cfg.episodes;
    emit_report("pad-example", resolved, secoord::to_json(rep), out);
    return 0;
}

int cmd_prune_check(const json& config, std::uint64_t seed, const Outputs& out) {
    const std::size_t instances = config.value("instances", 100);
    secoord::SchemeSizes sz;
    if (config.contains("sizes")) {
        const json& s = config.at("sizes");
        sz.nx = s.value("x", sz.nx);
        sz.ny = s.value("y", sz.ny);
        sz.nd = s.value("d", sz.nd);
        sz.nw = s.value("w", sz.nw);
        sz.nu = s.value("u", sz.nu);
        sz.nv = s.value("v", sz.nv);
        sz.nxh = s.value("xhat", sz.nxh);
    }

    using namespace secoord;
    double r_marginal = 0.0, r_yw = 0.0, r_chain = 0.0, r_inherit = 0.0, r_coords = 0.0;
    for (std::size_t i = 0; i < instances; ++i) {
        Substream rng = derive_stream(seed, {0x9121ULL, i});
        SchemeDist q = random_weak_chain_scheme(sz, rng);
        SchemeDist p = prune(q);

        JointDist q5 = marginal(q.joint, {kAxisXhat, kAxisW, kAxisU, kAxisV, kAxisX});
        JointDist p5 = marginal(p.joint, {kAxisXhat, kAxisW, kAxisU, kAxisV, kAxisX});
        for (std::size_t f = 0; f < q5.size(); ++f)
            r_marginal = std::max(r_marginal, std::abs(q5.table()[f] - p5.table()[f]));

        JointDist qyw = marginal(q.joint, {kAxisY, kAxisW});
        JointDist pyw = marginal(p.joint, {kAxisY, kAxisW});
        for (std::size_t f = 0; f < qyw.size(); ++f)
            r_yw = std::max(r_yw, std::abs(qyw.table()[f] - pyw.table()[f]));

        r_chain = std::max(r_chain, markov_deviation(p.joint, {kAxisD, kAxisY}, {kAxisX, kAxisW},
                                                     {kAxisU, kAxisV}));
        r_chain = std::max(r_chain, markov_deviation(p.joint, {kAxisD, kAxisX, kAxisY},
                                                     {kAxisU, kAxisV, kAxisW}, {kAxisXhat}));

        double dev_q = markov_deviation(q.joint, {kAxisW}, {kAxisY}, {kAxisX});
        double dev_p = markov_deviation(p.joint, {kAxisW}, {kAxisY}, {kAxisX});
        r_inherit = std::max(r_inherit, std::max(0.0, dev_p - dev_q));

        PayoffFn pf = PayoffFn::hamming(q.joint.axis(kAxisX), q.joint.axis(kAxisXhat));
        RatePoint rq = rate_point(q, {pf});
        RatePoint rp = rate_point(p, {pf});
        r_coords = std::max({r_coords, std::abs(rq.msg_rate - rp.msg_rate),
                             std::abs(rq.key_rate - rp.key_rate),
                             std::abs(rq.payoffs[0] - rp.payoffs[0])});
    }

    json results{{"instances", instances},
                 {"max_residuals",
                  {{"marginal_xhatwuvx", r_marginal},
                   {"yw_marginal", r_yw},
                   {"strong_chain", r_chain},
                   {"wyx_inheritance_excess", r_inherit},
                   {"rate_coords", r_coords}}}};

    json resolved = config;
    resolved["seed"] = seed;
    resolved["instances"] = instances;
    emit_report("prune-check", resolved, results, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure source coding with a two-sided helper: region and simulation tools"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, csv_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    double flag_p = 0.0;
    bool p_set = false;
    std::uint64_t flag_n = 0;
    bool n_set = false;

    app.add_option("--config", config_path, "JSON config path")->expected(1);
    auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
    app.add_option("--threads", threads, "cap OpenMP worker count");
    app.add_option("--out", out_path, "report output path (default stdout)");
    app.add_option("--csv", csv_path, "optional CSV output path");

    auto* c_point = app.add_subcommand("region-point", "evaluate a scheme's rate point");
    auto* c_search = app.add_subcommand("region-search", "maximize payoff under a rate budget");
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo codebook simulation");
    auto* c_soft = app.add_subcommand("softcover", "soft-covering TV experiment");
    auto* c_pad = app.add_subcommand("pad-example", "XOR pad with private side information");
    auto* c_prune = app.add_subcommand("prune-check", "pruning identities on random joints");
    auto* pad_p = c_pad->add_option("--p", flag_p, "Bern(p) side information");
    auto* pad_n = c_pad->add_option("--n", flag_n, "block length");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;
    p_set = pad_p->count() > 0;
    n_set = pad_n->count() > 0;

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    try {
        json config = load_config(config_path);
        const std::uint64_t final_seed = resolve_seed(config, seed_set, seed);
        Outputs out{out_path, csv_path};
        if (c_point->parsed()) return cmd_region_point(config, final_seed, out);
        if (c_search->parsed()) return cmd_region_search(config, final_seed, out);
        if (c_sim->parsed()) return cmd_simulate(config, final_seed, out);
        if (c_soft->parsed()) return cmd_softcover(config, final_seed, out);
        if (c_pad->parsed())
            return cmd_pad_example(config, final_seed, out, flag_p, p_set, flag_n, n_set);
        if (c_prune->parsed()) return cmd_prune_check(config, final_seed, out);
        throw secoord::config_error("no subcommand given");
    } catch (const secoord::resource_error& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const secoord::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const secoord::validation_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
