#include "qsk/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <omp.h>

#include "qsk/fft.hpp"

namespace qsk {

namespace {

constexpr std::size_t kBlock = 1 << 16; // samples per RNG block

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(a + 1)) ^ splitmix64(b + 0x51ED2701));
}

void fill_oracle_block(double* out, std::size_t count, const ModelParams& params,
                       std::uint64_t block_seed) {
    std::mt19937_64 eng(block_seed);
    if (params.epsilon == 0.0) {
        std::normal_distribution<double> normal(0.0, params.sigma * std::sqrt(params.horizon));
        for (std::size_t i = 0; i < count; ++i) out[i] = normal(eng);
    } else {
        const double mean_jumps = params.jump_count();
        std::poisson_distribution<long long> poisson(mean_jumps);
        const double drift = params.epsilon * mean_jumps;
        for (std::size_t i = 0; i < count; ++i)
            out[i] = drift - params.epsilon * static_cast<double>(poisson(eng));
    }
}

int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

// (H~ * G_h)(d) with H~(z) = H(-z): int H(y) G_h(d + y) dy, tabulated for the
// direct reference path.
struct BlurGaussTable {
    double lo, hi, step;
    std::vector<double> val;
    double operator()(double d) const {
        if (d <= lo || d >= hi) {
            return 0.0;
        }
        const double t = (d - lo) / step;
        const std::size_t i = std::min<std::size_t>(val.size() - 2, static_cast<std::size_t>(t));
        const double f = t - static_cast<double>(i);
        return (1.0 - f) * val[i] + f * val[i + 1];
    }
};

BlurGaussTable make_blur_gauss_table(const BlurringDensity& blur, double h) {
    const double span = 6.0 * h + std::max(std::abs(blur.support_lo()), std::abs(blur.support_hi()));
    BlurGaussTable t;
    t.lo = -span;
    t.hi = span;
    const int n = 8192;
    t.step = (t.hi - t.lo) / n;
    t.val.resize(n + 1);
    // 64-point midpoint rule over the blur support per table node
    const double a = blur.support_lo(), b = blur.support_hi();
    const double inv = 1.0 / (std::sqrt(2.0 * M_PI) * h);
    for (int i = 0; i <= n; ++i) {
        const double d = t.lo + i * t.step;
        // int_a^b H(y) G_h(d + y) dy
        double s = 0.0;
        const int q = 64;
        for (int j = 0; j < q; ++j) {
            const double y = a + (b - a) * (j + 0.5) / q;
            const double z = (d + y) / h;
            s += blur.pdf(y) * std::exp(-0.5 * z * z);
        }
        t.val[i] = s * (b - a) / q * inv;
    }
    return t;
}

} // namespace

bool ParticleConfig::validate() const {
    if (particles < 100) throw ConfigError("particle count must be >= 100");
    if (steps < 1) throw ConfigError("step count must be >= 1");
    if (!(density_floor > 0.0)) throw ConfigError("density floor must be > 0");
    return true;
}

PathEnsemble sample_oracle(const ModelParams& params, std::size_t n_samples, std::uint64_t seed,
                           int threads) {
    if (n_samples == 0) throw ConfigError("need at least one sample");
    PathEnsemble e;
    e.terminal.resize(n_samples);
    e.generator = "oracle";
    e.seed = seed;
    e.sigma = params.sigma;
    e.epsilon = params.epsilon;
    e.horizon = params.horizon;

    const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_threads(threads))
    for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t count = std::min(kBlock, n_samples - begin);
        fill_oracle_block(e.terminal.data() + begin, count, params, stream_seed(seed, b));
    }
    return e;
}

PathEnsemble sample_oracle_serial(const ModelParams& params, std::size_t n_samples,
                                  std::uint64_t seed) {
    if (n_samples == 0) throw ConfigError("need at least one sample");
    PathEnsemble e;
    e.terminal.resize(n_samples);
    e.generator = "oracle";
    e.seed = seed;
    e.sigma = params.sigma;
    e.epsilon = params.epsilon;
    e.horizon = params.horizon;
    for (std::size_t begin = 0, b = 0; begin < n_samples; begin += kBlock, ++b) {
        const std::size_t count = std::min(kBlock, n_samples - begin);
        fill_oracle_block(e.terminal.data() + begin, count, params, stream_seed(seed, b));
    }
    return e;
}

std::vector<double> mckean_ratio_direct(const std::vector<double>& positions,
                                        const BlurringDensity& blur, double bandwidth,
                                        double density_floor, int* floored) {
    const std::size_t n = positions.size();
    const BlurGaussTable table = make_blur_gauss_table(blur, bandwidth);
    const double inv = 1.0 / (std::sqrt(2.0 * M_PI) * bandwidth);
    std::vector<double> ratio(n);
    int fl = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double den = 0.0, num = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = positions[i] - positions[j];
            const double z = d / bandwidth;
            den += std::exp(-0.5 * z * z);
            num += table(d);
        }
        den *= inv / static_cast<double>(n);
        num /= static_cast<double>(n);
        if (den < density_floor) {
            den = density_floor;
            ++fl;
        }
        ratio[i] = std::max(num, 0.0) / den;
    }
    if (floored) *floored = fl;
    return ratio;
}

std::vector<double> mckean_ratio_binned(const std::vector<double>& positions,
                                        const BlurringDensity& blur, double bandwidth,
                                        double density_floor, int* floored, int threads) {
    const std::size_t n = positions.size();
    const int nt = resolve_threads(threads);

    const auto [mn_it, mx_it] = std::minmax_element(positions.begin(), positions.end());
    const double pad =
        6.0 * bandwidth + 2.0 * std::max(std::abs(blur.support_lo()), std::abs(blur.support_hi()));
    const double lo = *mn_it - pad, hi = *mx_it + pad;
    const int ng = 4096;
    const double dxg = (hi - lo) / ng;

    // linear binning (per-thread partial histograms)
    std::vector<double> hist(ng, 0.0);
#pragma omp parallel num_threads(nt)
    {
        std::vector<double> local(ng, 0.0);
#pragma omp for nowait
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            const double t = (positions[i] - lo) / dxg;
            const int i0 = std::min(ng - 2, std::max(0, static_cast<int>(t)));
            const double f = t - i0;
            local[i0] += 1.0 - f;
            local[i0 + 1] += f;
        }
#pragma omp critical
        for (int g = 0; g < ng; ++g) hist[g] += local[g];
    }
    const double norm = 1.0 / (static_cast<double>(n) * dxg);
    for (double& hv : hist) hv *= norm;

    // wrapped smoothing kernel and mirrored blur on the displacement grid,
    // both normalized to unit discrete mass (a blur narrower than the grid
    // spacing then degenerates to the discrete delta, the Dirac limit)
    std::vector<double> gk(ng), hm(ng);
    const double ginv = 1.0 / (std::sqrt(2.0 * M_PI) * bandwidth);
    for (int i = 0; i < ng; ++i) {
        const double d = (i <= ng / 2) ? i * dxg : (i - ng) * dxg;
        const double z = d / bandwidth;
        gk[i] = std::exp(-0.5 * z * z) * ginv;
        hm[i] = blur.pdf(-d);
    }
    double gsum = 0.0, hsum = 0.0;
    for (int i = 0; i < ng; ++i) {
        gsum += gk[i] * dxg;
        hsum += hm[i] * dxg;
    }
    for (double& v : gk) v /= gsum;
    if (hsum > 0.0) {
        for (double& v : hm) v /= hsum;
    } else {
        std::fill(hm.begin(), hm.end(), 0.0);
        hm[0] = 1.0 / dxg;
    }
    std::vector<double> p_hat = circular_convolve(hist, gk);
    for (double& v : p_hat) v *= dxg;
    std::vector<double> num = circular_convolve(p_hat, hm);
    for (double& v : num) v *= dxg;

    std::vector<double> ratio(n);
    int fl = 0;
#pragma omp parallel for reduction(+ : fl) num_threads(nt)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double t = (positions[i] - lo) / dxg;
        const int i0 = std::min(ng - 2, std::max(0, static_cast<int>(t)));
        const double f = t - i0;
        double den = (1.0 - f) * p_hat[i0] + f * p_hat[i0 + 1];
        const double nu = std::max((1.0 - f) * num[i0] + f * num[i0 + 1], 0.0);
        if (den < density_floor) {
            den = density_floor;
            ++fl;
        }
        ratio[i] = nu / den;
    }
    if (floored) *floored = fl;
    return ratio;
}

PathEnsemble run_particle_method(const BlurringDensity& blur, double sigma, double t,
                                 const ParticleConfig& cfg, std::uint64_t seed, int threads) {
    cfg.validate();
    if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
    if (!(t > 0.0)) throw DomainError("horizon must be > 0");
    if (blur.is_point_mass()) throw DomainError("particle method needs a density blur");

    const std::size_t n = cfg.particles;
    const int nt = resolve_threads(threads);
    const double dt = t / cfg.steps;
    const double h_floor = sigma * std::sqrt(dt);

    std::vector<double> xs(n, 0.0);
    std::vector<double> buf(n);
    std::vector<std::vector<double>> paths;
    int floored_total = 0;

    for (int step = 0; step < cfg.steps; ++step) {
        // Silverman rule with a one-step-diffusion floor
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= static_cast<double>(n > 1 ? n - 1 : 1);
        buf = xs;
        const std::size_t q1 = n / 4, q3 = (3 * n) / 4;
        std::nth_element(buf.begin(), buf.begin() + q1, buf.end());
        const double lo_q = buf[q1];
        std::nth_element(buf.begin(), buf.begin() + q3, buf.end());
        const double hi_q = buf[q3];
        const double iqr = hi_q - lo_q;
        double spread = std::sqrt(var);
        if (iqr > 0.0) spread = std::min(spread, iqr / 1.349);
        double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
        if (!(h > h_floor)) h = h_floor;

        int fl = 0;
        const std::vector<double> ratio = mckean_ratio_binned(xs, blur, h, cfg.density_floor, &fl, nt);
        floored_total += fl;

        const std::size_t blocks = (n + kBlock - 1) / kBlock;
        bool bad = false;
#pragma omp parallel for schedule(static) num_threads(nt) reduction(|| : bad)
        for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
            std::mt19937_64 eng(stream_seed(seed, step, b));
            std::normal_distribution<double> normal(0.0, 1.0);
            const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
            const std::size_t end = std::min(begin + kBlock, n);
            for (std::size_t i = begin; i < end; ++i) {
                xs[i] += sigma * std::sqrt(std::max(ratio[i], 0.0) * dt) * normal(eng);
                if (!std::isfinite(xs[i])) bad = true;
            }
        }
        if (bad) throw SimulationError("particle position became non-finite");
        if (cfg.record_paths) paths.push_back(xs);
    }

    PathEnsemble e;
    e.terminal = std::move(xs);
    e.paths = std::move(paths);
    e.generator = "particle";
    e.seed = seed;
    e.sigma = sigma;
    // the signed support extent of the blur (= eps for the triangular family)
    e.epsilon = blur.support_lo() + blur.support_hi();
    e.horizon = t;
    e.floored_particles = floored_total;
    return e;
}

EnsembleStats ensemble_stats(const PathEnsemble& e) {
    const std::size_t n = e.terminal.size();
    if (n == 0) throw StatsError("empty ensemble");
    if (n < 4) throw StatsError("kurtosis needs at least 4 samples");
    double mean = 0.0;
    for (double x : e.terminal) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : e.terminal) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    EnsembleStats s;
    s.mean = mean;
    s.variance = m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    s.skewness = (m2 > 0.0) ? m3 / std::pow(m2, 1.5) : 0.0;
    s.excess_kurtosis = (m2 > 0.0) ? m4 / (m2 * m2) - 3.0 : 0.0;
    return s;
}

double ks_distance(const PathEnsemble& e, const KernelDensity& kernel) {
    if (e.terminal.empty()) throw StatsError("empty ensemble");
    std::vector<double> s = e.terminal;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());

    const auto& pc = kernel.prefix_mass();
    const double tot = pc.back();
    double d = 0.0;
    // at the samples: both CDFs are step functions, so left and right limits
    // must be paired consistently (samples often sit exactly on kernel nodes)
    for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j; // tie block
        const double x = s[i];
        const double fe_right = static_cast<double>(j) / n;
        const double fe_left = static_cast<double>(i) / n;
        double fk_right = kernel.cdf(x);
        double fk_left = fk_right;
        const double u = (x - kernel.grid.x_min()) / kernel.grid.dx();
        const int node = static_cast<int>(std::floor(u + 0.5));
        if (node >= 0 && node < kernel.grid.n() && std::abs(u - node) < 1e-6)
            fk_left = node > 0 ? pc[node - 1] / tot : 0.0;
        d = std::max(d, std::abs(fe_right - fk_right));
        d = std::max(d, std::abs(fe_left - fk_left));
        i = j;
    }
    // at the kernel nodes: the kernel CDF steps there.  Samples that belong
    // to a node may differ from it by a few ulp, hence the +-slack lookups.
    const double slack = 1e-6 * kernel.grid.dx();
    for (int j = 0; j < kernel.grid.n(); ++j) {
        if (kernel.values[j] == 0.0) continue;
        const double x = kernel.grid.node(j);
        const double fe =
            static_cast<double>(std::upper_bound(s.begin(), s.end(), x + slack) - s.begin()) / n;
        const double fe_left =
            static_cast<double>(std::lower_bound(s.begin(), s.end(), x - slack) - s.begin()) / n;
        d = std::max(d, std::abs(fe - pc[j] / tot));
        d = std::max(d, std::abs(fe_left - (j > 0 ? pc[j - 1] : 0.0) / tot));
    }
    return d;
}

double ks_distance(const PathEnsemble& a, const PathEnsemble& b) {
    if (a.terminal.empty() || b.terminal.empty()) throw StatsError("empty ensemble");
    std::vector<double> sa = a.terminal, sb = b.terminal;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        const double x = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= x) ++i;
        while (j < sb.size() && sb[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

std::complex<double> empirical_cf(const PathEnsemble& e, double p, int threads) {
    if (e.terminal.empty()) throw StatsError("empty ensemble");
    double re = 0.0, im = 0.0;
    const long long n = static_cast<long long>(e.terminal.size());
#pragma omp parallel for reduction(+ : re, im) num_threads(resolve_threads(threads))
    for (long long i = 0; i < n; ++i) {
        re += std::cos(p * e.terminal[i]);
        im += std::sin(p * e.terminal[i]);
    }
    return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

} // namespace qsk
