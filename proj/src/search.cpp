#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "secoord/game.hpp"
#include "secoord/region.hpp"
#include "secoord/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace secoord {

namespace {

struct Dims {
    std::size_t nd, nx, ny, nw, nu, nv, nxh;
};

double table_entropy(std::span<const double> t) {
    double h = 0.0;
    for (double p : t)
        if (p > 0.0) h -= p * std::log2(p);
    return h < 0.0 ? 0.0 : h;
}

// All pmfs of length k whose entries are multiples of 1/resolution.
void gen_grid_pmfs_rec(std::size_t k, int remaining, int resolution, std::vector<double>& cur,
                       std::vector<std::vector<double>>& out) {
    if (cur.size() + 1 == k) {
        cur.push_back(static_cast<double>(remaining) / resolution);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int take = 0; take <= remaining; ++take) {
        cur.push_back(static_cast<double>(take) / resolution);
        gen_grid_pmfs_rec(k, remaining - take, resolution, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<double>> gen_grid_pmfs(std::size_t k, int resolution) {
    std::vector<std::vector<double>> out;
    std::vector<double> cur;
    gen_grid_pmfs_rec(k, resolution, resolution, cur, out);
    return out;
}

// Factor layouts used by the search engines:
//   Wf[y*nw + w]
//   UVf[((x*nw + w)*nu + u)*nv + v]
//   Dec[((u*nv + v)*nw + w)*nxh + xh]
struct FactorSet {
    std::vector<double> wf, uvf, dec;
};

// Fast scheme evaluator on flat arrays. Produces the same rate/payoff numbers
// as the JointDist path (same formulas, plain double arithmetic).
class Evaluator {
  public:
    Evaluator(const JointDist& source_dxy, const PayoffFn& payoff, Dims dm)
        : dm_(dm), payoff_(&payoff), source_(source_dxy.table()) {
        t_yw_.resize(dm.ny * dm.nw);
        t_xw_.resize(dm.nx * dm.nw);
        t_w_.resize(dm.nw);
        t_uvw_.resize(dm.nu * dm.nv * dm.nw);
        t_uw_.resize(dm.nu * dm.nw);
        t_xuvw_.resize(dm.nx * dm.nu * dm.nv * dm.nw);
        t_xuw_.resize(dm.nx * dm.nu * dm.nw);
        t_duw_.resize(dm.nd * dm.nu * dm.nw);
        t_duvw_.resize(dm.nd * dm.nu * dm.nv * dm.nw);
        nz_ = payoff.log_loss ? 0 : payoff.z_axis.size();
        double maps = 1.0;
        for (std::size_t v = 0; v < dm.nv; ++v) maps *= static_cast<double>(dm.nxh);
        maps_ = maps > 65536.0 ? std::numeric_limits<std::size_t>::max()
                               : static_cast<std::size_t>(maps);
        if (maps_ != std::numeric_limits<std::size_t>::max())
            game_.assign(maps_ * std::max<std::size_t>(nz_, 1), 0.0);
        qxxh_.resize(dm.nx * dm.nxh);
    }

    const Dims& dims() const { return dm_; }

    void set_factors(const double* wf, const double* uvf) {
        const Dims& d = dm_;
        std::fill(t_yw_.begin(), t_yw_.end(), 0.0);
        std::fill(t_xw_.begin(), t_xw_.end(), 0.0);
        std::fill(t_w_.begin(), t_w_.end(), 0.0);
        std::fill(t_uvw_.begin(), t_uvw_.end(), 0.0);
        std::fill(t_uw_.begin(), t_uw_.end(), 0.0);
        std::fill(t_xuvw_.begin(), t_xuvw_.end(), 0.0);
        std::fill(t_xuw_.begin(), t_xuw_.end(), 0.0);
        std::fill(t_duw_.begin(), t_duw_.end(), 0.0);
        std::fill(t_duvw_.begin(), t_duvw_.end(), 0.0);

        for (std::size_t dd = 0; dd < d.nd; ++dd)
            for (std::size_t x = 0; x < d.nx; ++x)
                for (std::size_t y = 0; y < d.ny; ++y) {
                    const double ps = source_[(dd * d.nx + x) * d.ny + y];
                    if (ps == 0.0) continue;
                    for (std::size_t w = 0; w < d.nw; ++w) {
                        const double pw = ps * wf[y * d.nw + w];
                        if (pw == 0.0) continue;
                        const double* uv_row = uvf + ((x * d.nw + w) * d.nu) * d.nv;
                        for (std::size_t u = 0; u < d.nu; ++u)
                            for (std::size_t v = 0; v < d.nv; ++v) {
                                const double p = pw * uv_row[u * d.nv + v];
                                if (p == 0.0) continue;
                                t_yw_[y * d.nw + w] += p;
                                t_xw_[x * d.nw + w] += p;
                                t_w_[w] += p;
                                t_uvw_[(u * d.nv + v) * d.nw + w] += p;
                                t_uw_[u * d.nw + w] += p;
                                t_xuvw_[((x * d.nu + u) * d.nv + v) * d.nw + w] += p;
                                t_xuw_[(x * d.nu + u) * d.nw + w] += p;
                                t_duw_[(dd * d.nu + u) * d.nw + w] += p;
                                t_duvw_[((dd * d.nu + u) * d.nv + v) * d.nw + w] += p;
                            }
                    }
                }

        double hy = 0.0;
        {
            // marginal of y from t_yw
            for (std::size_t y = 0; y < d.ny; ++y) {
                double py = 0.0;
                for (std::size_t w = 0; w < d.nw; ++w) py += t_yw_[y * d.nw + w];
                if (py > 0.0) hy -= py * std::log2(py);
            }
        }
        const double hw = table_entropy(t_w_);
        helper_rate_ = std::max(0.0, hy + hw - table_entropy(t_yw_));
        msg_rate_ = std::max(0.0, table_entropy(t_xw_) + table_entropy(t_uvw_) - hw -
                                      table_entropy(t_xuvw_));
        key_rate_ = std::max(0.0, table_entropy(t_duw_) + table_entropy(t_uvw_) -
                                      table_entropy(t_uw_) - table_entropy(t_duvw_));
    }

    double helper_rate() const { return helper_rate_; }
    double msg_rate() const { return msg_rate_; }
    double key_rate() const { return key_rate_; }

    // H(X|U,W) for the log-loss payoff value.
    double log_loss_value() const {
        return std::max(0.0, table_entropy(t_xuw_) - table_entropy(t_uw_));
    }

    // Payoff of the scheme against the per-(u,w) minimizing adversary, with
    // the decoder factor given.
    double value_given_decoder(const double* dec) {
        if (payoff_->log_loss) return log_loss_value();
        const Dims& d = dm_;
        double total = 0.0;
        for (std::size_t u = 0; u < d.nu; ++u)
            for (std::size_t w = 0; w < d.nw; ++w) {
                if (t_uw_[u * d.nw + w] == 0.0) continue;
                std::fill(qxxh_.begin(), qxxh_.end(), 0.0);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t v = 0; v < d.nv; ++v) {
                        const double p = t_xuvw_[((x * d.nu + u) * d.nv + v) * d.nw + w];
                        if (p == 0.0) continue;
                        const double* drow = dec + ((u * d.nv + v) * d.nw + w) * d.nxh;
                        for (std::size_t xh = 0; xh < d.nxh; ++xh)
                            qxxh_[x * d.nxh + xh] += p * drow[xh];
                    }
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t z = 0; z < nz_; ++z) {
                    double s = 0.0;
                    for (std::size_t x = 0; x < d.nx; ++x)
                        for (std::size_t xh = 0; xh < d.nxh; ++xh)
                            s += qxxh_[x * d.nxh + xh] * payoff_->value(x, xh, z);
                    best = std::min(best, s);
                }
                total += best;
            }
        return total;
    }

    // Exact decoder optimization: per (u,w) cell a zero-sum game whose pure
    // rows are the deterministic maps v -> xhat. Returns the optimal value;
    // when dec_out is given the mixed-map solution is expanded into rows.
    double exact_decoder_value(std::vector<double>* dec_out) {
        const Dims& d = dm_;
        if (payoff_->log_loss) {
            if (dec_out) {
                dec_out->assign(d.nu * d.nv * d.nw * d.nxh, 0.0);
                for (std::size_t r = 0; r < d.nu * d.nv * d.nw; ++r) (*dec_out)[r * d.nxh] = 1.0;
            }
            return log_loss_value();
        }
        if (maps_ == std::numeric_limits<std::size_t>::max())
            throw resource_error("decoder game has too many pure maps; lower the V/Xhat caps");
        if (dec_out) dec_out->assign(d.nu * d.nv * d.nw * d.nxh, 0.0);

        double total = 0.0;
        for (std::size_t u = 0; u < d.nu; ++u)
            for (std::size_t w = 0; w < d.nw; ++w) {
                const double puw = t_uw_[u * d.nw + w];
                if (puw == 0.0) {
                    if (dec_out)
                        for (std::size_t v = 0; v < d.nv; ++v)
                            (*dec_out)[((u * d.nv + v) * d.nw + w) * d.nxh] = 1.0;
                    continue;
                }
                for (std::size_t map = 0; map < maps_; ++map) {
                    double* grow = game_.data() + map * nz_;
                    for (std::size_t z = 0; z < nz_; ++z) grow[z] = 0.0;
                    std::size_t rem = map;
                    for (std::size_t v = 0; v < d.nv; ++v) {
                        const std::size_t xh = rem % d.nxh;
                        rem /= d.nxh;
                        for (std::size_t x = 0; x < d.nx; ++x) {
                            const double p = t_xuvw_[((x * d.nu + u) * d.nv + v) * d.nw + w];
                            if (p == 0.0) continue;
                            for (std::size_t z = 0; z < nz_; ++z)
                                grow[z] += p * payoff_->value(x, xh, z);
                        }
                    }
                }
                total += solve_cell_game(dec_out, u, w);
            }
        return total;
    }

  private:
    Dims dm_;
    const PayoffFn* payoff_;
    std::vector<double> source_;
    std::size_t nz_ = 0;
    std::size_t maps_ = 1;
    std::vector<double> game_;  // [map][z] scratch for one cell
    std::vector<double> qxxh_;  // [x][xhat] scratch
    std::vector<double> t_yw_, t_xw_, t_w_, t_uvw_, t_uw_, t_xuvw_, t_xuw_, t_duw_, t_duvw_;
    double helper_rate_ = 0.0, msg_rate_ = 0.0, key_rate_ = 0.0;

    void expand_map_mix(std::vector<double>* dec_out, std::size_t u, std::size_t w,
                        std::size_t map, double mix) const {
        if (!dec_out || mix == 0.0) return;
        const Dims& d = dm_;
        std::size_t rem = map;
        for (std::size_t v = 0; v < d.nv; ++v) {
            const std::size_t xh = rem % d.nxh;
            rem /= d.nxh;
            (*dec_out)[((u * d.nv + v) * d.nw + w) * d.nxh + xh] += mix;
        }
    }

    // Solve the cell game sitting in game_ (maps_ x nz_). Two adversary
    // actions get an allocation-free closed form; bigger games go through the
    // LP solver.
    double solve_cell_game(std::vector<double>* dec_out, std::size_t u, std::size_t w) {
        if (nz_ == 1) {
            std::size_t best = 0;
            for (std::size_t map = 1; map < maps_; ++map)
                if (game_[map] > game_[best]) best = map;
            expand_map_mix(dec_out, u, w, best, 1.0);
            return game_[best];
        }
        if (nz_ == 2) {
            double best_v = -std::numeric_limits<double>::infinity();
            std::size_t bi = 0, bj = 0;
            double balpha = 1.0;
            for (std::size_t i = 0; i < maps_; ++i) {
                double v = std::min(game_[i * 2], game_[i * 2 + 1]);
                if (v > best_v + 1e-15) {
                    best_v = v;
                    bi = bj = i;
                    balpha = 1.0;
                }
            }
            for (std::size_t i = 0; i < maps_; ++i)
                for (std::size_t j = i + 1; j < maps_; ++j) {
                    const double a0 = game_[i * 2], a1 = game_[i * 2 + 1];
                    const double b0 = game_[j * 2], b1 = game_[j * 2 + 1];
                    const double denom = (a0 - b0) - (a1 - b1);
                    if (std::abs(denom) < 1e-300) continue;
                    const double alpha = (b1 - b0) / denom;
                    if (!(alpha > 0.0 && alpha < 1.0)) continue;
                    const double f0 = alpha * a0 + (1.0 - alpha) * b0;
                    const double f1 = alpha * a1 + (1.0 - alpha) * b1;
                    const double v = std::min(f0, f1);
                    if (v > best_v + 1e-15) {
                        best_v = v;
                        bi = i;
                        bj = j;
                        balpha = alpha;
                    }
                }
            expand_map_mix(dec_out, u, w, bi, balpha);
            if (bj != bi) expand_map_mix(dec_out, u, w, bj, 1.0 - balpha);
            return best_v;
        }
        std::vector<std::vector<double>> m(maps_, std::vector<double>(nz_));
        for (std::size_t map = 0; map < maps_; ++map)
            for (std::size_t z = 0; z < nz_; ++z) m[map][z] = game_[map * nz_ + z];
        GameSolution sol = solve_zero_sum(m);
        for (std::size_t map = 0; map < maps_; ++map)
            expand_map_mix(dec_out, u, w, map, sol.row_mix[map]);
        return sol.value;
    }
};

Dims effective_dims(const JointDist& source_dxy, const PayoffFn& payoff,
                    const SearchConfig& cfg) {
    if (cfg.cap_w < 1 || cfg.cap_u < 1 || cfg.cap_v < 1)
        throw config_error("search caps must be >= 1");
    if (cfg.grid_resolution < 2) throw config_error("grid resolution must be >= 2");
    Dims d;
    d.nd = source_dxy.axis(kAxisD).size();
    d.nx = source_dxy.axis(kAxisX).size();
    d.ny = source_dxy.axis(kAxisY).size();
    d.nxh = payoff.xhat_axis.size();
    const std::size_t paper_w = d.nx * d.ny + 6;
    d.nw = cfg.paper_caps ? paper_w
                          : std::min<std::size_t>(static_cast<std::size_t>(cfg.cap_w), paper_w);
    const std::size_t paper_u = d.nx * d.ny * d.nw + 4;
    d.nu = cfg.paper_caps ? paper_u
                          : std::min<std::size_t>(static_cast<std::size_t>(cfg.cap_u), paper_u);
    const std::size_t paper_v = d.nx * d.ny * d.nw * d.nu * d.nxh + 2;
    d.nv = cfg.paper_caps ? paper_v
                          : std::min<std::size_t>(static_cast<std::size_t>(cfg.cap_v), paper_v);
    return d;
}

SchemeFactors materialize_factors(const JointDist& source_dxy, const PayoffFn& payoff,
                                  const Dims& d, const FactorSet& f) {
    const Alphabet& ax = source_dxy.axis(kAxisX);
    const Alphabet& ay = source_dxy.axis(kAxisY);
    Alphabet aw = Alphabet::indexed(kAxisW, d.nw);
    Alphabet au = Alphabet::indexed(kAxisU, d.nu);
    Alphabet av = Alphabet::indexed(kAxisV, d.nv);
    Alphabet axh{kAxisXhat, payoff.xhat_axis.symbols};

    SchemeFactors out;
    out.w_given_y = Channel({ay}, {aw}, f.wf);
    out.uv_given_xw = Channel({ax, aw}, {au, av}, f.uvf);
    out.xhat_given_uvw = Channel({au, av, aw}, {axh}, f.dec);
    return out;
}

struct Candidate {
    double value = -std::numeric_limits<double>::infinity();
    std::uint64_t ordinal = std::numeric_limits<std::uint64_t>::max();
    bool found = false;
};

void merge_candidate(Candidate& best, double value, std::uint64_t ordinal) {
    if (!best.found || value > best.value ||
        (value == best.value && ordinal < best.ordinal)) {
        best.found = true;
        best.value = value;
        best.ordinal = ordinal;
    }
}

// ----------------------------- grid engine --------------------------------

struct GridPlan {
    std::vector<std::vector<double>> w_pmfs;  // choices per W row
    std::vector<std::vector<double>> uv_pmfs; // full structure row choices
    std::vector<std::vector<double>> v_pmfs;  // reduced structure row choices
    bool u_fn_v = false;
    std::size_t w_rows = 0, uv_rows = 0;
    std::uint64_t w_total = 1, fn_total = 1, inner_total = 1;
};

std::uint64_t ipow_checked(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > cap / std::max<std::uint64_t>(base, 1)) return cap + 1;
        r *= base;
    }
    return r;
}

GridPlan plan_grid(const Dims& d, const SearchConfig& cfg) {
    GridPlan plan;
    plan.w_rows = d.ny;
    plan.uv_rows = d.nx * d.nw;
    plan.w_pmfs = gen_grid_pmfs(d.nw, cfg.grid_resolution);
    const std::uint64_t cap = cfg.max_grid_candidates;
    plan.w_total = ipow_checked(plan.w_pmfs.size(), plan.w_rows, cap);
    if (plan.w_total > cap)
        throw resource_error("grid enumeration of the W factor alone exceeds the budget");

    plan.uv_pmfs = gen_grid_pmfs(d.nu * d.nv, cfg.grid_resolution);
    std::uint64_t full_inner = ipow_checked(plan.uv_pmfs.size(), plan.uv_rows, cap);
    if (full_inner <= cap / std::max<std::uint64_t>(plan.w_total, 1)) {
        plan.u_fn_v = false;
        plan.inner_total = full_inner;
        plan.fn_total = 1;
        return plan;
    }
    // Reduced structure: U a deterministic function of V (region-preserving),
    // V-channel rows on the grid.
    plan.u_fn_v = true;
    plan.v_pmfs = gen_grid_pmfs(d.nv, cfg.grid_resolution);
    plan.fn_total = ipow_checked(d.nu, d.nv, cap);
    plan.inner_total = ipow_checked(plan.v_pmfs.size(), plan.uv_rows, cap);
    double total = static_cast<double>(plan.w_total) * static_cast<double>(plan.fn_total) *
                   static_cast<double>(plan.inner_total);
    if (plan.fn_total > cap || plan.inner_total > cap || total > static_cast<double>(cap)) {
        std::ostringstream os;
        os << "grid enumeration needs ~" << total << " candidates, budget "
           << cfg.max_grid_candidates << "; lower the caps or resolution";
        throw resource_error(os.str());
    }
    return plan;
}

void fill_w_factor(const GridPlan& plan, const Dims& d, std::uint64_t wi, std::vector<double>& wf) {
    wf.assign(d.ny * d.nw, 0.0);
    std::uint64_t rem = wi;
    for (std::size_t row = 0; row < plan.w_rows; ++row) {
        const auto& pmf = plan.w_pmfs[rem % plan.w_pmfs.size()];
        rem /= plan.w_pmfs.size();
        for (std::size_t w = 0; w < d.nw; ++w) wf[row * d.nw + w] = pmf[w];
    }
}

void fill_uv_factor(const GridPlan& plan, const Dims& d, std::uint64_t fn, std::uint64_t inner,
                    std::vector<double>& uvf) {
    uvf.assign(d.nx * d.nw * d.nu * d.nv, 0.0);
    if (!plan.u_fn_v) {
        std::uint64_t rem = inner;
        for (std::size_t row = 0; row < plan.uv_rows; ++row) {
            const auto& pmf = plan.uv_pmfs[rem % plan.uv_pmfs.size()];
            rem /= plan.uv_pmfs.size();
            for (std::size_t c = 0; c < d.nu * d.nv; ++c) uvf[row * d.nu * d.nv + c] = pmf[c];
        }
        return;
    }
    // u = f(v) with f decoded from fn
    std::vector<std::size_t> f_of_v(d.nv);
    std::uint64_t frem = fn;
    for (std::size_t v = 0; v < d.nv; ++v) {
        f_of_v[v] = frem % d.nu;
        frem /= d.nu;
    }
    std::uint64_t rem = inner;
    for (std::size_t row = 0; row < plan.uv_rows; ++row) {
        const auto& pmf = plan.v_pmfs[rem % plan.v_pmfs.size()];
        rem /= plan.v_pmfs.size();
        for (std::size_t v = 0; v < d.nv; ++v)
            uvf[row * d.nu * d.nv + f_of_v[v] * d.nv + v] = pmf[v];
    }
}

struct GridOutcome {
    std::vector<Candidate> per_budget;
    std::uint64_t evaluated = 0;
};

GridOutcome grid_sweep(const JointDist& source_dxy, const PayoffFn& payoff, const Dims& d,
                       const GridPlan& plan, const std::vector<RateBudget>& budgets) {
    GridOutcome out;
    out.per_budget.assign(budgets.size(), Candidate{});
    const std::uint64_t inner_count = plan.fn_total * plan.inner_total;

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Evaluator ev(source_dxy, payoff, d);
        std::vector<Candidate> local(budgets.size());
        std::vector<double> wf, uvf;
        std::uint64_t local_evals = 0;

#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1)
#endif
        for (long long wi = 0; wi < static_cast<long long>(plan.w_total); ++wi) {
            fill_w_factor(plan, d, static_cast<std::uint64_t>(wi), wf);
            for (std::uint64_t fn = 0; fn < plan.fn_total; ++fn) {
                for (std::uint64_t inner = 0; inner < plan.inner_total; ++inner) {
                    fill_uv_factor(plan, d, fn, inner, uvf);
                    ev.set_factors(wf.data(), uvf.data());
                    ++local_evals;
                    bool any = false;
                    for (const auto& b : budgets) {
                        if (ev.helper_rate() <= b.helper_rate + 1e-9 &&
                            ev.msg_rate() <= b.msg_rate + 1e-9 &&
                            ev.key_rate() <= b.key_rate + 1e-9) {
                            any = true;
                            break;
                        }
                    }
                    if (!any) continue;
                    const double value = ev.exact_decoder_value(nullptr);
                    const std::uint64_t ordinal =
                        static_cast<std::uint64_t>(wi) * inner_count + fn * plan.inner_total +
                        inner;
                    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
                        const auto& b = budgets[bi];
                        if (ev.helper_rate() <= b.helper_rate + 1e-9 &&
                            ev.msg_rate() <= b.msg_rate + 1e-9 &&
                            ev.key_rate() <= b.key_rate + 1e-9)
                            merge_candidate(local[bi], value, ordinal);
                    }
                }
            }
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            for (std::size_t bi = 0; bi < budgets.size(); ++bi)
                if (local[bi].found)
                    merge_candidate(out.per_budget[bi], local[bi].value, local[bi].ordinal);
            out.evaluated += local_evals;
        }
    }
    return out;
}

// ------------------------- coordinate ascent ------------------------------

struct AscentProblem {
    const JointDist* source_dxy;
    const PayoffFn* payoff;
    Dims d;
    RateBudget budget;
    const SearchConfig* cfg;
};

double penalized(const Evaluator& ev, double value, const RateBudget& b, double lambda) {
    double excess = std::max(0.0, ev.helper_rate() - b.helper_rate) +
                    std::max(0.0, ev.msg_rate() - b.msg_rate) +
                    std::max(0.0, ev.key_rate() - b.key_rate);
    return value - lambda * excess;
}

bool rates_ok(const Evaluator& ev, const RateBudget& b, double tol = 1e-9) {
    return ev.helper_rate() <= b.helper_rate + tol && ev.msg_rate() <= b.msg_rate + tol &&
           ev.key_rate() <= b.key_rate + tol;
}

void random_pmf(Substream& rng, std::span<double> row) {
    double total = 0.0;
    for (double& v : row) {
        v = -std::log(std::max(rng.uniform01(), 1e-300));
        total += v;
    }
    for (double& v : row) v /= total;
}

FactorSet init_factors(const AscentProblem& p, int restart, Substream& rng) {
    const Dims& d = p.d;
    FactorSet f;
    f.wf.assign(d.ny * d.nw, 0.0);
    f.uvf.assign(d.nx * d.nw * d.nu * d.nv, 0.0);
    f.dec.assign(d.nu * d.nv * d.nw * d.nxh, 0.0);
    auto point = [](std::span<double> row, std::size_t at) {
        std::fill(row.begin(), row.end(), 0.0);
        row[at] = 1.0;
    };
    auto wf_row = [&](std::size_t y) { return std::span(f.wf).subspan(y * d.nw, d.nw); };
    auto uv_row = [&](std::size_t x, std::size_t w) {
        return std::span(f.uvf).subspan((x * d.nw + w) * d.nu * d.nv, d.nu * d.nv);
    };
    auto dec_row = [&](std::size_t u, std::size_t v, std::size_t w) {
        return std::span(f.dec).subspan(((u * d.nv + v) * d.nw + w) * d.nxh, d.nxh);
    };

    for (std::size_t u = 0; u < d.nu; ++u)
        for (std::size_t v = 0; v < d.nv; ++v)
            for (std::size_t w = 0; w < d.nw; ++w) point(dec_row(u, v, w), 0);

    const bool can_carry_u = d.nu >= d.nx;
    const bool can_carry_v = d.nv >= d.nx;
    const bool can_w_copy = d.nw >= d.ny;
    switch (restart) {
        case 0: // silence
            for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), 0);
            for (std::size_t x = 0; x < d.nx; ++x)
                for (std::size_t w = 0; w < d.nw; ++w) point(uv_row(x, w), 0);
            return f;
        case 1: // public carry: u = x
            if (can_carry_u) {
                for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), 0);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t w = 0; w < d.nw; ++w) point(uv_row(x, w), x * d.nv);
                for (std::size_t u = 0; u < d.nu; ++u)
                    for (std::size_t v = 0; v < d.nv; ++v)
                        for (std::size_t w = 0; w < d.nw; ++w)
                            point(dec_row(u, v, w), std::min(u, d.nxh - 1));
                return f;
            }
            break;
        case 2: // protected carry: v = x
            if (can_carry_v) {
                for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), 0);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t w = 0; w < d.nw; ++w) point(uv_row(x, w), x);
                for (std::size_t u = 0; u < d.nu; ++u)
                    for (std::size_t v = 0; v < d.nv; ++v)
                        for (std::size_t w = 0; w < d.nw; ++w)
                            point(dec_row(u, v, w), std::min(v, d.nxh - 1));
                return f;
            }
            break;
        case 3: // one-time-pad mixing: v uniform over X, u = x + v
            if (can_carry_u && can_carry_v) {
                for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), 0);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t w = 0; w < d.nw; ++w) {
                        auto row = uv_row(x, w);
                        std::fill(row.begin(), row.end(), 0.0);
                        for (std::size_t v = 0; v < d.nx; ++v)
                            row[((x + v) % d.nx) * d.nv + v] = 1.0 / static_cast<double>(d.nx);
                    }
                for (std::size_t u = 0; u < d.nu; ++u)
                    for (std::size_t v = 0; v < d.nv; ++v)
                        for (std::size_t w = 0; w < d.nw; ++w) {
                            std::size_t xh = (u < d.nx && v < d.nx)
                                                 ? (u + d.nx - v % d.nx) % d.nx
                                                 : 0;
                            point(dec_row(u, v, w), std::min(xh, d.nxh - 1));
                        }
                return f;
            }
            break;
        case 4: // helper copy + public carry
            if (can_w_copy && can_carry_u) {
                for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), y);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t w = 0; w < d.nw; ++w) point(uv_row(x, w), x * d.nv);
                for (std::size_t u = 0; u < d.nu; ++u)
                    for (std::size_t v = 0; v < d.nv; ++v)
                        for (std::size_t w = 0; w < d.nw; ++w)
                            point(dec_row(u, v, w), std::min(u, d.nxh - 1));
                return f;
            }
            break;
        case 5: // helper copy + protected carry
            if (can_w_copy && can_carry_v) {
                for (std::size_t y = 0; y < d.ny; ++y) point(wf_row(y), y);
                for (std::size_t x = 0; x < d.nx; ++x)
                    for (std::size_t w = 0; w < d.nw; ++w) point(uv_row(x, w), x);
                for (std::size_t u = 0; u < d.nu; ++u)
                    for (std::size_t v = 0; v < d.nv; ++v)
                        for (std::size_t w = 0; w < d.nw; ++w)
                            point(dec_row(u, v, w), std::min(v, d.nxh - 1));
                return f;
            }
            break;
        default:
            break;
    }
    // random start
    for (std::size_t y = 0; y < d.ny; ++y) random_pmf(rng, wf_row(y));
    for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t w = 0; w < d.nw; ++w) random_pmf(rng, uv_row(x, w));
    return f;
}

// Enforce the V-independence reduction: q(u,v|x,w) = q_V(v) * q(u|x,w,v) with
// a shared q_V. Projects the current factor onto that family.
void project_v_independent(const Dims& d, std::vector<double>& uvf,
                           const std::vector<double>& xw_weights) {
    std::vector<double> qv(d.nv, 0.0);
    double tot = 0.0;
    for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t w = 0; w < d.nw; ++w) {
            const double pw = xw_weights[x * d.nw + w];
            for (std::size_t u = 0; u < d.nu; ++u)
                for (std::size_t v = 0; v < d.nv; ++v) {
                    qv[v] += pw * uvf[((x * d.nw + w) * d.nu + u) * d.nv + v];
                    tot += pw * uvf[((x * d.nw + w) * d.nu + u) * d.nv + v];
                }
        }
    if (tot <= 0.0) return;
    for (double& v : qv) v /= tot;
    for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t w = 0; w < d.nw; ++w) {
            double* row = uvf.data() + (x * d.nw + w) * d.nu * d.nv;
            for (std::size_t v = 0; v < d.nv; ++v) {
                double col = 0.0;
                for (std::size_t u = 0; u < d.nu; ++u) col += row[u * d.nv + v];
                if (col > 0.0) {
                    for (std::size_t u = 0; u < d.nu; ++u)
                        row[u * d.nv + v] *= qv[v] / col;
                } else {
                    for (std::size_t u = 0; u < d.nu; ++u)
                        row[u * d.nv + v] = (u == 0 ? qv[v] : 0.0);
                }
            }
        }
}

struct AscentResult {
    FactorSet factors;
    double value = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::uint64_t evals = 0;
};

AscentResult ascend(const AscentProblem& p, int restart) {
    const Dims& d = p.d;
    Substream rng = derive_stream(p.cfg->seed, {static_cast<std::uint64_t>(Role::Search),
                                                static_cast<std::uint64_t>(restart)});
    Evaluator ev(*p.source_dxy, *p.payoff, d);
    FactorSet f = init_factors(p, restart, rng);

    auto eval_obj = [&](double lambda) {
        ev.set_factors(f.wf.data(), f.uvf.data());
        return penalized(ev, ev.value_given_decoder(f.dec.data()), p.budget, lambda);
    };

    AscentResult res;
    const int n_rand = 6;
    std::vector<double> trial;
    double lambda = 1.0;
    for (int esc = 0; esc < 8; ++esc) {
        double cur = eval_obj(lambda);
        ++res.evals;
        for (int iter = 0; iter < p.cfg->max_iters; ++iter) {
            double before = cur;

            // decoder step: exact game solve, never hurts the objective
            ev.set_factors(f.wf.data(), f.uvf.data());
            std::vector<double> dec_new;
            double v_exact = ev.exact_decoder_value(&dec_new);
            double cand = penalized(ev, v_exact, p.budget, lambda);
            ++res.evals;
            if (cand > cur) {
                f.dec = dec_new;
                cur = cand;
            }

            // row steps over the W and UV factors
            auto improve_row = [&](std::vector<double>& table, std::size_t offset,
                                   std::size_t len) {
                std::span<double> row(table.data() + offset, len);
                std::vector<double> saved(row.begin(), row.end());
                std::vector<double> best(saved);
                double best_obj = cur;
                auto try_row = [&](const std::vector<double>& candidate) {
                    std::copy(candidate.begin(), candidate.end(), row.begin());
                    double o = eval_obj(lambda);
                    ++res.evals;
                    if (o > best_obj + 1e-15) {
                        best_obj = o;
                        best.assign(row.begin(), row.end());
                    }
                };
                trial.assign(len, 0.0);
                for (std::size_t i = 0; i < len; ++i) {
                    std::fill(trial.begin(), trial.end(), 0.0);
                    trial[i] = 1.0;
                    try_row(trial);
                }
                for (int r = 0; r < n_rand; ++r) {
                    random_pmf(rng, trial);
                    try_row(trial);
                    for (std::size_t i = 0; i < len; ++i)
                        trial[i] = 0.5 * trial[i] + 0.5 * saved[i];
                    try_row(trial);
                }
                std::copy(best.begin(), best.end(), row.begin());
                cur = best_obj;
            };

            for (std::size_t y = 0; y < d.ny; ++y) improve_row(f.wf, y * d.nw, d.nw);
            for (std::size_t x = 0; x < d.nx; ++x)
                for (std::size_t w = 0; w < d.nw; ++w)
                    improve_row(f.uvf, (x * d.nw + w) * d.nu * d.nv, d.nu * d.nv);

            if (p.cfg->v_independent) {
                // D-9 reduction: keep the UV factor inside the family where V
                // is independent of (X, Y, D, W), unless that costs payoff.
                std::vector<double> saved = f.uvf;
                ev.set_factors(f.wf.data(), f.uvf.data());
                std::vector<double> xw_weights(d.nx * d.nw, 1.0);
                project_v_independent(d, f.uvf, xw_weights);
                double projected = eval_obj(lambda);
                ++res.evals;
                if (projected + p.cfg->tol < cur) {
                    f.uvf = std::move(saved);
                } else {
                    cur = std::max(cur, projected);
                }
            }

            if (cur - before <= p.cfg->tol) break;
        }
        ev.set_factors(f.wf.data(), f.uvf.data());
        if (rates_ok(ev, p.budget)) break;
        lambda *= 10.0;
    }

    ev.set_factors(f.wf.data(), f.uvf.data());
    res.feasible = rates_ok(ev, p.budget);
    res.value = ev.value_given_decoder(f.dec.data());
    res.factors = std::move(f);
    return res;
}

SearchResult constant_fallback(const SourceSpec& src, const JointDist& source_dxy,
                               const PayoffFn& payoff, const Dims& d) {
    FactorSet f;
    f.wf.assign(d.ny * d.nw, 0.0);
    f.uvf.assign(d.nx * d.nw * d.nu * d.nv, 0.0);
    for (std::size_t y = 0; y < d.ny; ++y) f.wf[y * d.nw] = 1.0;
    for (std::size_t x = 0; x < d.nx; ++x) f.uvf[(x * d.nw) * d.nu * d.nv] = 1.0;
    Evaluator ev(source_dxy, payoff, d);
    ev.set_factors(f.wf.data(), f.uvf.data());
    ev.exact_decoder_value(&f.dec);

    SearchResult out;
    SchemeFactors factors = materialize_factors(source_dxy, payoff, d, f);
    out.scheme = build_scheme(source_dxy, factors);
    out.point = rate_point(out.scheme, src.payoffs);
    out.budget_feasible = false;
    out.engine = "constant_fallback";
    return out;
}

} // namespace

std::vector<SearchResult> best_payoff_lattice(const SourceSpec& src,
                                              const std::vector<RateBudget>& budgets,
                                              std::size_t payoff_index,
                                              const SearchConfig& cfg) {
    if (payoff_index >= src.payoffs.size()) throw config_error("payoff index out of range");
    const PayoffFn& payoff = src.payoffs[payoff_index];
    JointDist source_dxy = src.source_joint();
    const Dims d = effective_dims(source_dxy, payoff, cfg);

    std::vector<SearchResult> results(budgets.size());

    if (cfg.engine == SearchConfig::Engine::grid) {
        GridPlan plan = plan_grid(d, cfg);
        GridOutcome sweep = grid_sweep(source_dxy, payoff, d, plan, budgets);
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            if (!sweep.per_budget[bi].found) {
                results[bi] = constant_fallback(src, source_dxy, payoff, d);
                results[bi].candidates_evaluated = sweep.evaluated;
                continue;
            }
            // rebuild the winning candidate from its ordinal
            const std::uint64_t ordinal = sweep.per_budget[bi].ordinal;
            const std::uint64_t inner_count = plan.fn_total * plan.inner_total;
            const std::uint64_t wi = ordinal / inner_count;
            const std::uint64_t fn = (ordinal % inner_count) / plan.inner_total;
            const std::uint64_t inner = ordinal % plan.inner_total;
            FactorSet f;
            fill_w_factor(plan, d, wi, f.wf);
            fill_uv_factor(plan, d, fn, inner, f.uvf);
            Evaluator ev(source_dxy, payoff, d);
            ev.set_factors(f.wf.data(), f.uvf.data());
            ev.exact_decoder_value(&f.dec);

            SearchResult r;
            SchemeFactors factors = materialize_factors(source_dxy, payoff, d, f);
            r.scheme = build_scheme(source_dxy, factors);
            r.point = rate_point(r.scheme, src.payoffs);
            r.payoff_value = r.point.payoffs[payoff_index];
            r.budget_feasible = budgets[bi].admits(r.point);
            r.engine = plan.u_fn_v ? "grid(u_fn_v)" : "grid(full)";
            r.candidates_evaluated = sweep.evaluated;
            results[bi] = std::move(r);
        }
        return results;
    }

    // Coordinate ascent: budgets handled in order; feasible winners seed the
    // later (larger) budgets so the lattice stays monotone.
    std::vector<std::pair<RatePoint, FactorSet>> pool;
    for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
        AscentProblem prob{&source_dxy, &payoff, d, budgets[bi], &cfg};
        std::vector<AscentResult> runs(cfg.restarts);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (int r = 0; r < cfg.restarts; ++r) runs[r] = ascend(prob, r);

        // pool warm starts: previously found schemes already inside this budget
        Evaluator ev(source_dxy, payoff, d);
        for (const auto& [pt, fs] : pool) {
            if (!budgets[bi].admits(pt)) continue;
            AscentResult warm;
            warm.factors = fs;
            ev.set_factors(fs.wf.data(), fs.uvf.data());
            warm.feasible = rates_ok(ev, budgets[bi]);
            warm.value = ev.value_given_decoder(fs.dec.data());
            runs.push_back(std::move(warm));
        }

        int best = -1;
        std::uint64_t evals = 0;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            evals += runs[r].evals;
            if (!runs[r].feasible) continue;
            if (best < 0 || runs[r].value > runs[static_cast<std::size_t>(best)].value)
                best = static_cast<int>(r);
        }
        if (best < 0) {
            results[bi] = constant_fallback(src, source_dxy, payoff, d);
            results[bi].candidates_evaluated = evals;
            continue;
        }
        const AscentResult& win = runs[static_cast<std::size_t>(best)];
        SearchResult r;
        SchemeFactors factors = materialize_factors(source_dxy, payoff, d, win.factors);
        r.scheme = build_scheme(source_dxy, factors);
        r.point = rate_point(r.scheme, src.payoffs);
        r.payoff_value = r.point.payoffs[payoff_index];
        r.budget_feasible = budgets[bi].admits(r.point);
        r.engine = "coordinate_ascent";
        r.candidates_evaluated = evals;
        if (!r.budget_feasible) {
            results[bi] = constant_fallback(src, source_dxy, payoff, d);
            results[bi].candidates_evaluated = evals;
            continue;
        }
        pool.emplace_back(r.point, win.factors);
        results[bi] = std::move(r);
    }
    return results;
}

SearchResult best_payoff(const SourceSpec& src, const RateBudget& budget,
                         std::size_t payoff_index, const SearchConfig& cfg) {
    return best_payoff_lattice(src, {budget}, payoff_index, cfg)[0];
}

} // namespace secoord
