// Timing comparison of the serial reference kernels against the OpenMP
// paths, checking along the way that both produce identical numbers.
#include <chrono>
#include <cstdio>
#include <string>

#include "secoord/pad.hpp"
#include "secoord/region.hpp"
#include "secoord/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace secoord;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

int threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

int main(int argc, char** argv) {
    std::size_t episodes = argc > 1 ? std::stoul(argv[1]) : 20000;

    SourceSpec src = SourceSpec::binary_symmetric(
        0.0, {PayoffFn::hamming(Alphabet::indexed(kAxisX, 2), Alphabet::indexed(kAxisXhat, 2))});
    SchemeDist scheme = build_scheme(src.source_joint(), presets::one_time_pad(src));
    Rates rates{0.0, 1.0, 0.5};

    std::printf("monte_carlo: n=6 episodes=%zu bayesian adversary, %d thread(s)\n", episodes,
                threads());
    double t0 = now_s();
    SimReport ser = monte_carlo_serial(src, scheme, 6, rates, {"bayesian"}, episodes, 7);
    double t1 = now_s();
    SimReport par = monte_carlo(src, scheme, 6, rates, {"bayesian"}, episodes, 7);
    double t2 = now_s();
    bool same = ser.adversaries[0].payoff_mean[0] == par.adversaries[0].payoff_mean[0] &&
                ser.adversaries[0].payoff_stderr[0] == par.adversaries[0].payoff_stderr[0];
    std::printf("  serial   %.3f s  mean=%.6f\n", t1 - t0, ser.adversaries[0].payoff_mean[0]);
    std::printf("  parallel %.3f s  mean=%.6f  speedup=%.2fx  identical=%s\n", t2 - t1,
                par.adversaries[0].payoff_mean[0], (t1 - t0) / (t2 - t1), same ? "yes" : "NO");

    std::printf("pad_scheme: p=0.25 n=14\n");
    PadConfig cfg;
    cfg.p = 0.25;
    cfg.n = 14;
    cfg.seed = 7;
    cfg.episodes = 600;
    double t3 = now_s();
    PadReport pad = pad_scheme(cfg);
    double t4 = now_s();
    std::printf("  %.3f s  block=%.4f formula=%.4f\n", t4 - t3, pad.block_mean, pad.formula);

    std::printf("grid sweep: caps 2/2/2 resolution 8\n");
    SourceSpec gsrc = SourceSpec::binary_symmetric(
        0.1, {PayoffFn::lossless_hamming(Alphabet::indexed(kAxisX, 2),
                                         Alphabet::indexed(kAxisXhat, 2))});
    SearchConfig gcfg;
    gcfg.engine = SearchConfig::Engine::grid;
    gcfg.cap_w = gcfg.cap_u = gcfg.cap_v = 2;
    gcfg.grid_resolution = 8;
    gcfg.seed = 7;
    double t5 = now_s();
    SearchResult r = best_payoff(gsrc, RateBudget{}, 0, gcfg);
    double t6 = now_s();
    std::printf("  %.3f s  candidates=%llu best=%.4f\n", t6 - t5,
                static_cast<unsigned long long>(r.candidates_evaluated), r.payoff_value);

    return same ? 0 : 1;
}
