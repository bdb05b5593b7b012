#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qsk/geometry.hpp"
#include "qsk/kernel.hpp"
#include "qsk/model.hpp"

namespace qsk {

/// Terminal Monte-Carlo samples with generator provenance.  Identical
/// (seed, params, engine) reproduce byte-identical ensembles regardless of
/// the thread count (samples are generated in fixed blocks with per-block
/// generators derived from the master seed).
struct PathEnsemble {
    std::vector<double> terminal;
    std::vector<std::vector<double>> paths; // optional per-step snapshots
    std::string generator;                  // "oracle" or "particle"
    std::uint64_t seed = 0;
    double sigma = 0.0, epsilon = 0.0, horizon = 0.0;
    int floored_particles = 0; // particle engine: density-floor events
};

/// Exact sampler for the transition law: N ~ Poisson(sigma^2 t/eps^2),
/// x = eps*(lambda t) - eps*N (Gaussian sigma sqrt(t) draws when eps = 0).
/// Satisfies E[exp(ipx)] = exp(t m(p)) identically.
PathEnsemble sample_oracle(const ModelParams& params, std::size_t n_samples, std::uint64_t seed,
                           int threads = 0);

/// Single-loop reference implementation; produces the same ensemble as the
/// blocked parallel version (kept for testing and benchmarks).
PathEnsemble sample_oracle_serial(const ModelParams& params, std::size_t n_samples,
                                  std::uint64_t seed);

struct ParticleConfig {
    std::size_t particles = 100000;
    int steps = 50;             // Euler steps over the horizon
    double density_floor = 1e-8;
    bool record_paths = false;  // keep per-step position snapshots
    bool validate() const;
};

/// Diffusion-ratio field of the interacting-particle dynamics
/// dx = sigma sqrt( E_y[H(y - x)] / p(x) ) dW at each particle position,
/// with p estimated by a Gaussian kernel density estimate (bandwidth h).
/// Direct O(N^2) evaluation: the serial reference.
std::vector<double> mckean_ratio_direct(const std::vector<double>& positions,
                                        const BlurringDensity& blur, double bandwidth,
                                        double density_floor, int* floored = nullptr);

/// Same field via linear binning and FFT convolution (production path,
/// OpenMP-parallel in the binning/interpolation loops).
std::vector<double> mckean_ratio_binned(const std::vector<double>& positions,
                                        const BlurringDensity& blur, double bandwidth,
                                        double density_floor, int* floored = nullptr,
                                        int threads = 0);

/// Interacting-particle solver for the nonlocal diffusion driven by the
/// blurring density: bulk-synchronous Euler-Maruyama with kernel density
/// estimation (Silverman bandwidth floored at sigma sqrt(dt)).
PathEnsemble run_particle_method(const BlurringDensity& blur, double sigma, double t,
                                 const ParticleConfig& cfg, std::uint64_t seed, int threads = 0);

struct EnsembleStats {
    double mean, variance, skewness, excess_kurtosis;
};

/// Standard sample estimators (variance with the n-1 divisor); kurtosis
/// needs at least 4 samples.
EnsembleStats ensemble_stats(const PathEnsemble& e);

/// One-sample Kolmogorov-Smirnov distance against the kernel's CDF
/// (exact sup over the merged breakpoints of both step functions).
double ks_distance(const PathEnsemble& e, const KernelDensity& kernel);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(const PathEnsemble& a, const PathEnsemble& b);

/// Empirical characteristic function (1/n) sum exp(i p x_j).
std::complex<double> empirical_cf(const PathEnsemble& e, double p, int threads = 0);

} // namespace qsk
