// Serial-reference vs OpenMP-parallel timings for the compute-heavy paths.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "qsk/kernel.hpp"
#include "qsk/simulate.hpp"

using namespace qsk;

namespace {

template <typename F>
double time_s(F&& f, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
    }
    return best;
}

} // namespace

int main() {
    const double day = 1.0 / 252;
    const int threads = omp_get_max_threads();
    std::printf("threads available: %d\n\n", threads);
    std::printf("%-44s %10s %10s %8s\n", "benchmark", "serial", "parallel", "speedup");

    {
        const ModelParams p(0.2, 0.01, day);
        const std::size_t n = 5000000;
        const double ts = time_s([&] { sample_oracle_serial(p, n, 1); });
        const double tp = time_s([&] { sample_oracle(p, n, 1, threads); });
        std::printf("%-44s %9.3fs %9.3fs %7.2fx\n", "oracle sampling, 5e6 draws", ts, tp, ts / tp);
    }
    {
        // deterministic cloud for the field comparison
        const std::size_t n = 20000;
        std::vector<double> xs(n);
        for (std::size_t i = 0; i < n; ++i)
            xs[i] = 0.0126 * std::sin(0.37 * static_cast<double>(i)) +
                    2.5e-7 * static_cast<double>(i);
        const BlurringDensity blur = BlurringDensity::triangular(0.01);
        const double ts = time_s([&] { mckean_ratio_direct(xs, blur, 1.3e-3, 1e-8); }, 1);
        const double tp = time_s([&] { mckean_ratio_binned(xs, blur, 1.3e-3, 1e-8, nullptr, threads); });
        std::printf("%-44s %9.3fs %9.3fs %7.2fx\n",
                    "mckean ratio field, N=2e4 (direct vs binned)", ts, tp, ts / tp);
    }
    {
        ParticleConfig cfg;
        cfg.particles = 100000;
        cfg.steps = 50;
        const BlurringDensity blur = BlurringDensity::triangular(0.01);
        const double t1 = time_s([&] { run_particle_method(blur, 0.2, day, cfg, 3, 1); }, 1);
        const double tp = time_s([&] { run_particle_method(blur, 0.2, day, cfg, 3, threads); }, 1);
        std::printf("%-44s %9.3fs %9.3fs %7.2fx\n", "particle method, N=1e5, 50 steps", t1, tp,
                    t1 / tp);
    }
    {
        const ModelParams p(0.2, 0.01, 1.0);
        const SpatialGrid g = auto_grid(p);
        const double tk = time_s([&] { compute_kernel(p, g); });
        std::printf("%-44s %9.3fs %10s %8s\n",
                    ("kernel synthesis, n=" + std::to_string(g.n())).c_str(), tk, "-", "-");
    }
    {
        const ModelParams p(0.2, 0.01, day);
        const PathEnsemble e = sample_oracle(p, 5000000, 2, threads);
        const double ts = time_s([&] {
            for (double pp : {10.0, 50.0, 100.0}) empirical_cf(e, pp, 1);
        });
        const double tp = time_s([&] {
            for (double pp : {10.0, 50.0, 100.0}) empirical_cf(e, pp, threads);
        });
        std::printf("%-44s %9.3fs %9.3fs %7.2fx\n", "empirical characteristic function, 5e6 x 3",
                    ts, tp, ts / tp);
    }
    return 0;
}
