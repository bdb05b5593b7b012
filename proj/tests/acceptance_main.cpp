// Acceptance suite: every criterion prints one pass/fail line with the
// measured quantity and its pinned tolerance.  The exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "qsk/geometry.hpp"
#include "qsk/kernel.hpp"
#include "qsk/model.hpp"
#include "qsk/pricing.hpp"
#include "qsk/simulate.hpp"

using namespace qsk;

namespace {

constexpr double kDay = 1.0 / 252;
int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

char buf[512];

void criterion1() {
    const double t0 = now_s();
    const ModelParams p(0.2, 0.0, kDay);
    const KernelDensity k = compute_kernel(p);
    const double var = 0.04 * kDay;
    double sup = 0.0;
    for (int j = 0; j < k.grid.n(); ++j) {
        const double x = k.grid.node(j);
        const double g = std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * M_PI * var);
        sup = std::max(sup, std::abs(k.values[j] - g));
    }
    const double secs = now_s() - t0;
    std::snprintf(buf, sizeof(buf), "sup=%.3g <= 1e-6, %.2f s < 1 s", sup, secs);
    report(1, "gaussian baseline", sup <= 1e-6 && secs < 1.0, buf);
}

void criterion2() {
    const ModelParams p(0.2, 0.01, kDay);
    const auto m = empirical_moments(compute_kernel(p), 4);
    const double skew = m[2] / std::pow(m[1], 1.5);
    const double kurt = m[3] / (m[1] * m[1]) - 3.0;
    const double skew_target = -0.7937253933192722; // -eps/(sigma sqrt(t))
    const double kurt_target = 0.63;                // eps^2/(sigma^2 t)

    // cross-check against the Monte-Carlo oracle
    const PathEnsemble e = sample_oracle(p, 1000000, 11);
    const EnsembleStats s = ensemble_stats(e);

    const bool ok = std::abs(skew - skew_target) <= 0.01 * std::abs(skew_target) &&
                    std::abs(kurt - kurt_target) <= 0.02 * kurt_target &&
                    std::abs(s.skewness - skew_target) <= 0.05 * std::abs(skew_target);
    std::snprintf(buf, sizeof(buf),
                  "skew=%.6f vs %.6f +-1%%, kurt=%.6f vs %.4f +-2%%, oracle skew=%.4f +-5%%",
                  skew, skew_target, kurt, kurt_target, s.skewness);
    report(2, "cumulant law", ok, buf);
}

void criterion3() {
    const double t0 = now_s();
    const ModelParams p(0.2, 0.01, kDay);
    const std::size_t n = 1000000;
    const PathEnsemble e = sample_oracle(p, n, 20250811);
    const KernelDensity k = compute_kernel(p);
    const double ks = ks_distance(e, k);
    double cf_err = 0.0;
    for (double pp : {10.0, 50.0, 100.0}) {
        const std::complex<double> emp = empirical_cf(e, pp);
        const std::complex<double> exact = std::exp(kDay * characteristic_exponent(pp, p));
        cf_err = std::max(cf_err, std::abs(emp - exact));
    }
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    const double secs = now_s() - t0;
    const bool ok = ks <= 0.005 && cf_err <= bound && secs < 30.0;
    std::snprintf(buf, sizeof(buf), "KS=%.5f <= 0.005, |ecf-exact|=%.5f <= %.4f, %.1f s < 30 s",
                  ks, cf_err, bound, secs);
    report(3, "oracle equivalence", ok, buf);
}

void criterion4() {
    const std::vector<double> mats{kDay, 1.0 / 52, 1.0 / 12, 1.0};
    const std::vector<double> offsets{-1.0, -0.5, 0.0, 0.5, 1.0};
    bool ok = true;
    std::string detail;
    for (double eps : {0.005, 0.01}) {
        const SmileSurface s = build_smile(ModelParams(0.2, eps, kDay), 1.0, mats, offsets);
        const auto slopes = skew_term_structure(s);
        for (double sl : slopes) ok = ok && sl < 0.0;
        // |slope| ~ c t^{-1/2}: compare each maturity against the 1y anchor
        for (std::size_t i = 0; i + 1 < mats.size(); ++i) {
            const double ratio = slopes[i] / slopes.back();
            const double target = std::sqrt(1.0 / mats[i]);
            ok = ok && std::abs(ratio / target - 1.0) <= 0.15;
            if (eps == 0.01 && i == 0) {
                std::snprintf(buf, sizeof(buf), "slope(1d)/slope(1y)=%.2f vs sqrt(252)=%.2f",
                              ratio, target);
                detail = buf;
            }
        }
    }
    report(4, "skew flattening t^(-1/2) within 15%", ok, detail);
}

void criterion5() {
    double worst = 0.0;
    for (double eps : {0.0, 0.005, -0.005, 0.01, -0.01}) {
        const ModelParams p(0.2, eps, kDay);
        const SpatialGrid g = auto_grid(p);
        const KernelDensity whole = compute_kernel(p, g);
        const KernelDensity half = compute_kernel(p.with_horizon(1.0 / 504), g);
        const KernelDensity comp = compose(half, half);
        worst = std::max(worst, sup_diff(comp.values, whole.values));
    }
    std::snprintf(buf, sizeof(buf), "max sup over eps set = %.3g <= 1e-5", worst);
    report(5, "semigroup composition", worst <= 1e-5, buf);
}

void criterion6() {
    // fixed grid whose band |eps p| <= 1.8 stays inside the first lobe of the
    // characteristic function, where the polynomial symbols converge
    const ModelParams p(0.2, 0.01, kDay);
    const SpatialGrid g = SpatialGrid::with_spacing(0.01 * M_PI / 1.8, 256);
    const auto delta = delta_density(g);
    const KernelDensity closed =
        spectral_propagate(delta, g, p, TruncationSpec::closed_form(), kDay);
    bool mono = true;
    double prev = 1e100, last = 0.0;
    std::string seq;
    for (int K : {2, 4, 6, 8, 10, 12}) {
        const KernelDensity kk = spectral_propagate(delta, g, p, TruncationSpec::series(K), kDay);
        const double err = sup_diff(kk.values, closed.values);
        mono = mono && err < prev;
        prev = err;
        last = err;
        std::snprintf(buf, sizeof(buf), "%sK%d=%.1e", seq.empty() ? "" : " ", K, err);
        seq += buf;
    }
    std::snprintf(buf, sizeof(buf), "%s; monotone=%s, K12 <= 1e-6", seq.c_str(),
                  mono ? "yes" : "no");
    report(6, "truncation convergence", mono && last <= 1e-6, buf);
}

void criterion7() {
    double worst_tri = 0.0;
    for (double eps : {0.01, -0.01}) {
        const BlurringDensity b = BlurringDensity::triangular(eps);
        const MomentSequence ref = flat_metric_moments(eps, 8);
        for (int i = 0; i <= 8; ++i)
            worst_tri = std::max(worst_tri, std::abs(b.moment(i) - ref.values[i]) /
                                                std::max(std::abs(ref.values[i]), 1e-300));
    }
    double worst_rec = 0.0;
    for (double alpha : {2.0, -0.7}) {
        const MomentSequence s = exp_metric_moments(0.01, alpha, 10);
        double eps_pow = 1.0;
        for (int k = 2; k <= 10; ++k) {
            const double lhs = k * alpha * s.values[k - 1];
            const double rhs = 2.0 * k * (k - 1.0) * s.values[k - 2] - 4.0 * eps_pow;
            worst_rec = std::max(worst_rec,
                                 std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0}));
            eps_pow *= 0.01;
        }
    }
    std::snprintf(buf, sizeof(buf), "moment rel err=%.2g <= 1e-10, recurrence rel res=%.2g <= 1e-12",
                  worst_tri, worst_rec);
    report(7, "blurring moment realization", worst_tri <= 1e-10 && worst_rec <= 1e-12, buf);
}

void criterion8() {
    const double eps = 0.01;
    const MetricFit fit = fit_metric_weights(BlurringDensity::triangular(eps), eps, 8);
    double wdev = 0.0;
    for (double w : fit.w) wdev = std::max(wdev, std::abs(w - 1.0));
    const MetricFit dirac = fit_metric_weights(BlurringDensity::point_mass(eps), eps, 4);
    double dres = 0.0;
    for (double r : dirac.residuals) dres = std::max(dres, std::abs(r));
    const bool ok = fit.feasible && wdev <= 1e-8 && !dirac.feasible && dres > 1e-2;
    std::snprintf(buf, sizeof(buf), "|w-1|=%.2g <= 1e-8; dirac infeasible with max res %.2g", wdev,
                  dres);
    report(8, "metric fit round trip and infeasibility report", ok, buf);
}

void criterion9() {
    const ModelParams p(0.2, 0.01, 1.0);
    double worst_dual = 0.0, worst_grad = 0.0, worst_series = 0.0;
    for (double xdot = -2.0; xdot <= 2.0; xdot += 0.05) { // |eps xdot/sigma^2| <= 0.5
        const double p0 = stationary_momentum(xdot, p);
        const double L = lagrangian(xdot, p);
        worst_dual = std::max(worst_dual, std::abs(L - legendre_hamiltonian(p0, xdot, p)));
        const double d = 1e-5 * (1.0 + std::abs(p0));
        worst_grad = std::max(worst_grad, std::abs((legendre_hamiltonian(p0 + d, xdot, p) -
                                                    legendre_hamiltonian(p0 - d, xdot, p)) /
                                                   (2.0 * d)));
        worst_series =
            std::max(worst_series, std::abs(lagrangian(xdot, p, TruncationSpec::series(80)) - L));
    }
    const bool ok = worst_dual <= 1e-9 && worst_grad <= 1e-9 && worst_series <= 1e-9;
    std::snprintf(buf, sizeof(buf), "duality=%.2g, gradient=%.2g, series-closed=%.2g, all <= 1e-9",
                  worst_dual, worst_grad, worst_series);
    report(9, "legendre duality", ok, buf);
}

void criterion10() {
    const double t0 = now_s();
    const BlurringDensity blur = BlurringDensity::triangular(0.01);
    const ModelParams p(0.2, 0.01, kDay);
    std::vector<double> ks_by_n;
    for (std::size_t n : {std::size_t(1000), std::size_t(10000), std::size_t(100000)}) {
        ParticleConfig cfg;
        cfg.particles = n;
        cfg.steps = 50;
        const PathEnsemble part = run_particle_method(blur, 0.2, kDay, cfg, 31);
        const PathEnsemble oracle = sample_oracle(p, n, 17);
        ks_by_n.push_back(ks_distance(part, oracle));
    }
    const bool decreasing = ks_by_n[0] > ks_by_n[1] && ks_by_n[1] > ks_by_n[2];
    const double secs = now_s() - t0;
    const bool ok = ks_by_n.back() <= 0.02 && decreasing && secs < 120.0;
    std::snprintf(buf, sizeof(buf),
                  "KS(N=1e3,1e4,1e5)=%.3f,%.3f,%.3f; need <= 0.02 at N=1e5, decreasing=%s, "
                  "%.0f s < 120 s [the exact law is atomic with max atom mass 0.325, so any "
                  "diffusive ensemble has KS >= 0.162]",
                  ks_by_n[0], ks_by_n[1], ks_by_n[2], decreasing ? "yes" : "no", secs);
    report(10, "particle method vs oracle", ok, buf);
}

void criterion11() {
    // parity
    double worst_parity = 0.0;
    for (double eps : {0.0, 0.005, -0.01}) {
        const ModelParams p(0.2, eps, kDay);
        const KernelDensity k = compute_kernel(p);
        for (double strike : {0.985, 1.0, 1.007}) {
            const double call = price_european({1.0, strike, kDay, OptionSide::call}, k);
            const double put = price_european({1.0, strike, kDay, OptionSide::put}, k);
            worst_parity = std::max(worst_parity, std::abs(call - put - (1.0 - strike)));
        }
    }
    // flat normal vols in the gaussian model
    const std::vector<double> offsets{-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
    const SmileSurface flat = build_smile(ModelParams(0.2, 0.0, kDay), 1.0, {kDay}, offsets);
    double worst_flat = 0.0;
    for (double v : flat.vols[0]) worst_flat = std::max(worst_flat, std::abs(v - 0.2));
    // mirror symmetry
    const SmileSurface up = build_smile(ModelParams(0.2, 0.01, kDay), 1.0, {kDay}, offsets);
    const SmileSurface dn = build_smile(ModelParams(0.2, -0.01, kDay), 1.0, {kDay}, offsets);
    double worst_mirror = 0.0;
    for (std::size_t i = 0; i < offsets.size(); ++i)
        worst_mirror = std::max(worst_mirror,
                                std::abs(up.vols[0][i] - dn.vols[0][offsets.size() - 1 - i]));
    const bool ok = worst_parity <= 1e-6 && worst_flat <= 1e-4 && worst_mirror <= 1e-6;
    std::snprintf(buf, sizeof(buf), "parity=%.2g <= 1e-6, flat=%.2g <= 1e-4, mirror=%.2g <= 1e-6",
                  worst_parity, worst_flat, worst_mirror);
    report(11, "pricing coherence", ok, buf);
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    std::printf("acceptance: %d of 11 criteria failed\n", failures);
    return failures;
}
