// qskernel: non-Gaussian transition kernels for translated diffusion models,
// their nonlocal-geometry counterparts, Monte-Carlo engines and option
// pricing, from one command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "qsk/csv.hpp"
#include "qsk/errors.hpp"
#include "qsk/geometry.hpp"
#include "qsk/kernel.hpp"
#include "qsk/model.hpp"
#include "qsk/pricing.hpp"
#include "qsk/simulate.hpp"
#include "qsk/svg.hpp"

namespace {

constexpr const char* kVersion = "qskernel 0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitUsage = 64;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw qsk::ConfigError("empty numeric list: " + csv);
    return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

// Coarse-grain a lattice kernel to one point per jump cell so charts show
// the mass envelope rather than the comb of grid spikes.
qsk::SvgSeries kernel_series(const qsk::KernelDensity& k, const std::string& label,
                             const std::string& color) {
    qsk::SvgSeries s;
    s.label = label;
    s.color = color;
    const double eps = k.params.epsilon;
    if (eps == 0.0) {
        const int stride = std::max(1, k.grid.n() / 512);
        for (int j = 0; j < k.grid.n(); j += stride) {
            s.x.push_back(k.grid.node(j));
            s.y.push_back(k.values[j]);
        }
        return s;
    }
    const int cell = std::max(1, static_cast<int>(std::lround(std::abs(eps) / k.grid.dx())));
    for (int j0 = 0; j0 + cell <= k.grid.n(); j0 += cell) {
        double mass = 0.0;
        for (int j = j0; j < j0 + cell; ++j) mass += k.values[j] * k.grid.dx();
        const double dens = mass / std::abs(eps);
        if (dens > 1e-9) {
            s.x.push_back(k.grid.node(j0 + cell / 2));
            s.y.push_back(dens);
        }
    }
    return s;
}

struct ValidateReport {
    int failures = 0;
    void check(const std::string& name, bool ok, const std::string& detail = "") {
        std::printf("[%s] %s%s%s\n", ok ? "ok" : "FAIL", name.c_str(),
                    detail.empty() ? "" : ": ", detail.c_str());
        if (!ok) ++failures;
    }
};

int run_validate(int threads);

} // namespace

int main(int argc, char** argv) {
    // configuration precedence: flags > JSON config file > defaults
    nlohmann::json config;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream f(argv[i + 1]);
            if (!f) {
                std::fprintf(stderr, "error: io: cannot read config %s\n", argv[i + 1]);
                return kExitDomain;
            }
            try {
                f >> config;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: config: %s\n", e.what());
                return kExitDomain;
            }
        }
    }
    auto cfg_num = [&](const char* key, double dflt) {
        return config.contains(key) ? config[key].get<double>() : dflt;
    };
    auto cfg_str = [&](const char* key, std::string dflt) {
        return config.contains(key) ? config[key].get<std::string>() : dflt;
    };

    CLI::App app{"non-Gaussian transition kernels, nonlocal-diffusion geometry, "
                 "Monte-Carlo engines and option pricing"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path, out_dir = cfg_str("out", ".");
    int threads = static_cast<int>(cfg_num("threads", 0));
    app.add_option("--config", config_path, "JSON config file (flags take precedence)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = logical cores)");

    double sigma = cfg_num("sigma", 0.2);
    double horizon = cfg_num("t", 1.0 / 252);
    std::string eps_list = cfg_str("epsilon", "0.01");
    int grid_n = static_cast<int>(cfg_num("grid_n", 0));
    double grid_width = cfg_num("grid_width", 0.0);

    // kernel
    auto* c_kernel = app.add_subcommand("kernel", "transition kernels as CSV plus an SVG chart");
    c_kernel->add_option("--sigma", sigma, "volatility (x per sqrt(year))");
    c_kernel->add_option("--t", horizon, "horizon in years");
    c_kernel->add_option("--epsilon", eps_list, "translation length(s), comma separated");
    c_kernel->add_option("--grid-n", grid_n, "grid size override (power of two)");
    c_kernel->add_option("--grid-width", grid_width, "grid width override");

    // moments
    auto* c_moments = app.add_subcommand("moments", "blurring-density moment sequences as CSV");
    double alpha = cfg_num("alpha", 0.0);
    int order = static_cast<int>(cfg_num("order", 8));
    std::string eps_one = cfg_str("epsilon", "0.01");
    c_moments->add_option("--epsilon", eps_one, "translation length");
    c_moments->add_option("--alpha", alpha, "metric decay rate (0 = flat family)");
    c_moments->add_option("--order", order, "highest moment order");

    // fit-metric
    auto* c_fit = app.add_subcommand("fit-metric", "fit g(y)^(-1/2) weights to the moment equations");
    std::string blur_kind = cfg_str("blur", "triangular");
    double blur_lo = cfg_num("blur_lo", 0.0), blur_hi = cfg_num("blur_hi", 0.02);
    c_fit->add_option("--blur", blur_kind, "triangular | uniform | point");
    c_fit->add_option("--epsilon", eps_one, "target translation length");
    c_fit->add_option("--order", order, "number of moment equations minus one");
    c_fit->add_option("--blur-lo", blur_lo, "uniform blur lower edge");
    c_fit->add_option("--blur-hi", blur_hi, "uniform blur upper edge");

    // simulate
    auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo ensembles with a JSON stats sidecar");
    std::string engine = cfg_str("engine", "oracle");
    std::uint64_t seed = static_cast<std::uint64_t>(cfg_num("seed", 20250811));
    double samples_d = cfg_num("samples", 100000);
    int steps = static_cast<int>(cfg_num("steps", 50));
    c_sim->add_option("--engine", engine, "oracle | particle");
    c_sim->add_option("--sigma", sigma, "volatility");
    c_sim->add_option("--epsilon", eps_one, "translation length");
    c_sim->add_option("--t", horizon, "horizon in years");
    c_sim->add_option("--samples", samples_d, "sample / particle count");
    c_sim->add_option("--steps", steps, "Euler steps (particle engine)");
    c_sim->add_option("--seed", seed, "RNG seed");

    // price
    auto* c_price = app.add_subcommand("price", "European option price and implied vols");
    double spot = cfg_num("spot", 1.0), strike = cfg_num("strike", 1.0);
    double discount = cfg_num("discount", 1.0);
    std::string side = cfg_str("side", "call");
    c_price->add_option("--sigma", sigma, "volatility");
    c_price->add_option("--epsilon", eps_one, "translation length");
    c_price->add_option("--t", horizon, "maturity in years");
    c_price->add_option("--spot", spot, "spot price");
    c_price->add_option("--strike", strike, "strike price");
    c_price->add_option("--side", side, "call | put");
    c_price->add_option("--discount", discount,
                        "deterministic discount multiplier applied to the printed price");

    // smile
    auto* c_smile = app.add_subcommand("smile", "implied-vol surface and skew term structure");
    std::string mats_list = cfg_str("maturities", "0.003968253968253968,0.019230769230769232,"
                                                  "0.08333333333333333,1.0");
    std::string offsets_list = cfg_str("offsets", "-1.0,-0.5,0.0,0.5,1.0");
    std::string convention = cfg_str("convention", "normal");
    c_smile->add_option("--sigma", sigma, "volatility");
    c_smile->add_option("--epsilon", eps_one, "translation length");
    c_smile->add_option("--spot", spot, "spot price");
    c_smile->add_option("--maturities", mats_list, "maturities in years, comma separated");
    c_smile->add_option("--offsets", offsets_list, "strike offsets in stdev units");
    c_smile->add_option("--convention", convention, "normal | lognormal");

    // validate
    auto* c_validate = app.add_subcommand("validate", "run the invariant suite (nonzero exit on failure)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (threads > 0) omp_set_num_threads(threads);

    try {
        using namespace qsk;

        if (c_kernel->parsed()) {
            const std::vector<double> eps_values = parse_list(eps_list);
            std::vector<SvgSeries> series;
            const std::vector<std::string> palette{"#2a9d3a", "#1f77b4", "#17becf", "#e6b400",
                                                   "#ff7f0e", "#9467bd", "#8c564b"};
            for (std::size_t i = 0; i < eps_values.size(); ++i) {
                const double eps = eps_values[i];
                const ModelParams params(sigma, eps, horizon);
                SpatialGrid grid = auto_grid(params);
                if (grid_n > 0 || grid_width > 0.0) {
                    const int n = grid_n > 0 ? grid_n : grid.n();
                    const double width = grid_width > 0.0 ? grid_width : grid.n() * grid.dx();
                    grid = SpatialGrid::centered(width / 2.0, n);
                }
                const KernelDensity k = compute_kernel(params, grid);
                const std::string comment = std::string(kVersion) + " kernel sigma=" + num(sigma) +
                                            " epsilon=" + num(eps) + " t=" + num(horizon) +
                                            " n=" + std::to_string(grid.n()) +
                                            " dx=" + num(grid.dx());
                const std::string fname = "kernel_eps" + short_num(eps) + ".csv";
                write_file(out_path(out_dir, fname), csv_kernel(k, comment));
                std::printf("wrote %s\n", out_path(out_dir, fname).c_str());
                series.push_back(kernel_series(k, "eps=" + short_num(eps),
                                               palette[i % palette.size()]));
            }
            const std::string chart = svg_line_chart(
                "transition kernels, sigma=" + short_num(sigma) + ", t=" + short_num(horizon),
                "x", "density", series);
            write_file(out_path(out_dir, "kernels.svg"), chart);
            std::printf("wrote %s\n", out_path(out_dir, "kernels.svg").c_str());
            return kExitOk;
        }

        if (c_moments->parsed()) {
            const double eps = std::stod(eps_one);
            const MomentSequence seq = (alpha == 0.0) ? flat_metric_moments(eps, order)
                                                      : exp_metric_moments(eps, alpha, order);
            const std::string comment = std::string(kVersion) + " moments epsilon=" + num(eps) +
                                        " alpha=" + num(alpha) + " order=" + std::to_string(order);
            write_file(out_path(out_dir, "moments.csv"), csv_moments(seq, comment));
            std::printf("wrote %s\n", out_path(out_dir, "moments.csv").c_str());
            return kExitOk;
        }

        if (c_fit->parsed()) {
            const double eps = std::stod(eps_one);
            BlurringDensity blur = [&] {
                if (blur_kind == "triangular") return BlurringDensity::triangular(eps);
                if (blur_kind == "uniform") return BlurringDensity::uniform(blur_lo, blur_hi);
                if (blur_kind == "point") return BlurringDensity::point_mass(eps);
                throw ConfigError("unknown blur kind: " + blur_kind);
            }();
            const MetricFit fit = fit_metric_weights(blur, eps, order);
            const std::string comment = std::string(kVersion) + " fit-metric blur=" + blur_kind +
                                        " epsilon=" + num(eps) + " order=" + std::to_string(order);
            write_file(out_path(out_dir, "metric_weights.csv"), csv_weights(fit, comment));
            std::printf("wrote %s\n", out_path(out_dir, "metric_weights.csv").c_str());
            for (std::size_t i = 0; i < fit.residuals.size(); ++i)
                std::printf("moment %zu residual %.3e\n", i, fit.residuals[i]);
            if (!fit.feasible) {
                std::fprintf(stderr,
                             "error: infeasible: no nonnegative weight profile matches the "
                             "moment equations within %.1e\n",
                             fit.tolerance);
                return kExitDomain;
            }
            std::printf("feasible within %.1e\n", fit.tolerance);
            return kExitOk;
        }

        if (c_sim->parsed()) {
            const double eps = std::stod(eps_one);
            const std::size_t n = static_cast<std::size_t>(samples_d);
            PathEnsemble e;
            if (engine == "oracle") {
                e = sample_oracle(ModelParams(sigma, eps, horizon), n, seed, threads);
            } else if (engine == "particle") {
                ParticleConfig pc;
                pc.particles = n;
                pc.steps = steps;
                e = run_particle_method(BlurringDensity::triangular(eps), sigma, horizon, pc,
                                        seed, threads);
            } else {
                throw ConfigError("unknown engine: " + engine);
            }
            const std::string comment = std::string(kVersion) + " simulate engine=" + engine +
                                        " sigma=" + num(sigma) + " epsilon=" + num(eps) +
                                        " t=" + num(horizon) + " samples=" + std::to_string(n) +
                                        " seed=" + std::to_string(seed);
            write_file(out_path(out_dir, "samples.csv"), csv_samples(e, comment));
            write_file(out_path(out_dir, "stats.json"), json_ensemble_stats(e));
            std::printf("wrote %s\nwrote %s\n", out_path(out_dir, "samples.csv").c_str(),
                        out_path(out_dir, "stats.json").c_str());
            return kExitOk;
        }

        if (c_price->parsed()) {
            const double eps = std::stod(eps_one);
            const OptionSpec spec{spot, strike, horizon,
                                  side == "put" ? OptionSide::put : OptionSide::call};
            const double price = price_european(spec, ModelParams(sigma, eps, horizon));
            std::printf("price %.12g\n", discount * price);
            for (auto [conv, name] : {std::pair{VolConvention::normal, "normal"},
                                      std::pair{VolConvention::lognormal, "lognormal"}}) {
                try {
                    std::printf("implied_vol_%s %.12g\n", name, implied_vol(price, spec, conv));
                } catch (const Error& err) {
                    std::printf("implied_vol_%s n/a (%s)\n", name, err.code().c_str());
                }
            }
            return kExitOk;
        }

        if (c_smile->parsed()) {
            const double eps = std::stod(eps_one);
            const VolConvention conv =
                convention == "lognormal" ? VolConvention::lognormal : VolConvention::normal;
            const std::vector<double> mats = parse_list(mats_list);
            const std::vector<double> offsets = parse_list(offsets_list);
            const SmileSurface surface =
                build_smile(ModelParams(sigma, eps, mats.front()), spot, mats, offsets, conv);
            const std::string comment = std::string(kVersion) + " smile sigma=" + num(sigma) +
                                        " epsilon=" + num(eps) + " spot=" + num(spot) +
                                        " convention=" + convention;
            write_file(out_path(out_dir, "smile.csv"), csv_smile(surface, comment));
            std::printf("wrote %s\n", out_path(out_dir, "smile.csv").c_str());

            std::vector<SvgSeries> series;
            const std::vector<std::string> palette{"#1f77b4", "#2a9d3a", "#e6b400", "#ff7f0e"};
            for (std::size_t mi = 0; mi < mats.size(); ++mi) {
                SvgSeries s;
                s.label = "t=" + short_num(mats[mi]);
                s.color = palette[mi % palette.size()];
                s.x = surface.offsets;
                s.y = surface.vols[mi];
                series.push_back(std::move(s));
            }
            write_file(out_path(out_dir, "smile.svg"),
                       svg_line_chart("implied vol (" + convention + "), sigma=" +
                                          short_num(sigma) + ", eps=" + short_num(eps),
                                      "strike offset (stdev)", "vol", series));
            std::printf("wrote %s\n", out_path(out_dir, "smile.svg").c_str());

            const auto slopes = skew_term_structure(surface);
            for (std::size_t mi = 0; mi < mats.size(); ++mi)
                std::printf("atm_skew_slope t=%.6g %.8g\n", mats[mi], slopes[mi]);
            return kExitOk;
        }

        if (c_validate->parsed()) return run_validate(threads);
    } catch (const qsk::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.code().c_str(), e.what());
        return kExitDomain;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return kExitDomain;
    }
    return kExitUsage;
}

namespace {

int run_validate(int threads) {
    using namespace qsk;
    ValidateReport rep;
    const double day = 1.0 / 252;
    const auto t0 = std::chrono::steady_clock::now();

    {
        const ModelParams p(0.2, 0.0, day);
        const KernelDensity k = compute_kernel(p);
        double sup = 0.0;
        const double var = 0.04 * day;
        for (int j = 0; j < k.grid.n(); ++j) {
            const double g =
                std::exp(-0.5 * k.grid.node(j) * k.grid.node(j) / var) / std::sqrt(2 * M_PI * var);
            sup = std::max(sup, std::abs(k.values[j] - g));
        }
        rep.check("gaussian baseline sup-norm <= 1e-6", sup <= 1e-6, short_num(sup));
    }
    {
        const ModelParams p(0.2, 0.01, day);
        const auto m = empirical_moments(compute_kernel(p), 4);
        const double skew = m[2] / std::pow(m[1], 1.5);
        const double kurt = m[3] / (m[1] * m[1]) - 3.0;
        rep.check("kernel skewness -0.794 +- 1%", std::abs(skew + 0.7937253933) < 0.0079,
                  short_num(skew));
        rep.check("kernel excess kurtosis 0.63 +- 2%", std::abs(kurt - 0.63) < 0.0126,
                  short_num(kurt));
    }
    {
        const ModelParams p(0.2, 0.01, day);
        const SpatialGrid g = auto_grid(p);
        const KernelDensity whole = compute_kernel(p, g);
        const KernelDensity half = compute_kernel(p.with_horizon(0.5 * day), g);
        const KernelDensity comp = compose(half, half);
        double sup = 0.0;
        for (int j = 0; j < g.n(); ++j)
            sup = std::max(sup, std::abs(comp.values[j] - whole.values[j]));
        rep.check("semigroup sup-norm <= 1e-5", sup <= 1e-5, short_num(sup));
    }
    {
        const ModelParams p(0.2, 0.01, 1.0);
        double worst = 0.0;
        for (double pp = -100.0; pp <= 100.0; pp += 1.0) {
            const auto closed = characteristic_exponent(pp, p);
            worst = std::max(worst, std::abs(closed - characteristic_exponent(
                                                          pp, p, TruncationSpec::series(24))));
            worst = std::max(
                worst, std::abs(closed - std::complex<double>(0, -1) *
                                             dispersion_omega(std::complex<double>(0, -pp), p)));
        }
        rep.check("resummation + rotation identities <= 1e-10", worst <= 1e-10, short_num(worst));
    }
    {
        const ModelParams p(0.2, 0.01, 1.0);
        double worst = 0.0;
        for (double xdot = -2.0; xdot <= 2.0; xdot += 0.05) {
            const double p0 = stationary_momentum(xdot, p);
            worst = std::max(worst,
                             std::abs(lagrangian(xdot, p) - legendre_hamiltonian(p0, xdot, p)));
            const double d = 1e-5 * (1.0 + std::abs(p0));
            worst = std::max(worst, std::abs((legendre_hamiltonian(p0 + d, xdot, p) -
                                              legendre_hamiltonian(p0 - d, xdot, p)) /
                                             (2.0 * d)));
        }
        rep.check("legendre duality <= 1e-9", worst <= 1e-9, short_num(worst));
    }
    {
        double worst = 0.0;
        const BlurringDensity b = BlurringDensity::triangular(0.01);
        const MomentSequence ref = flat_metric_moments(0.01, 8);
        for (int i = 0; i <= 8; ++i)
            worst = std::max(worst, std::abs(b.moment(i) - ref.values[i]) /
                                        std::max(std::abs(ref.values[i]), 1e-300));
        rep.check("triangular blur realizes the moment formula (rel 1e-10)", worst <= 1e-10,
                  short_num(worst));
        const MetricFit fit = fit_metric_weights(b, 0.01, 8);
        double wdev = 0.0;
        for (double w : fit.w) wdev = std::max(wdev, std::abs(w - 1.0));
        rep.check("metric fit round trip w == 1 within 1e-8", fit.feasible && wdev <= 1e-8,
                  short_num(wdev));
        rep.check("point-mass blur reported infeasible",
                  !fit_metric_weights(BlurringDensity::point_mass(0.01), 0.01, 4).feasible);
    }
    {
        const ModelParams p(0.2, 0.01, day);
        const PathEnsemble e = sample_oracle(p, 200000, 20250811, threads);
        double worst = 0.0;
        for (double pp : {10.0, 50.0, 100.0})
            worst = std::max(worst, std::abs(empirical_cf(e, pp, threads) -
                                             std::exp(day * characteristic_exponent(pp, p))));
        rep.check("oracle characteristic function within 4/sqrt(n)",
                  worst <= 4.0 / std::sqrt(200000.0), short_num(worst));
        const double ks = ks_distance(e, compute_kernel(p));
        rep.check("oracle vs kernel KS <= 0.005", ks <= 0.005, short_num(ks));
    }
    {
        const ModelParams p(0.2, 0.01, day);
        const SpatialGrid g = SpatialGrid::with_spacing(0.01 * M_PI / 1.8, 256);
        const auto delta = delta_density(g);
        const KernelDensity closed =
            spectral_propagate(delta, g, p, TruncationSpec::closed_form(), day);
        double prev = 1e100;
        bool mono = true;
        double last = 0.0;
        for (int K : {2, 4, 6, 8, 10, 12}) {
            const KernelDensity kk =
                spectral_propagate(delta, g, p, TruncationSpec::series(K), day);
            double err = 0.0;
            for (int j = 0; j < g.n(); ++j)
                err = std::max(err, std::abs(kk.values[j] - closed.values[j]));
            mono = mono && err < prev;
            prev = err;
            last = err;
        }
        rep.check("truncation sweep monotone, <= 1e-6 at K=12", mono && last <= 1e-6,
                  short_num(last));
    }
    {
        const OptionSpec atm{1.0, 1.0, day, OptionSide::call};
        const ModelParams p(0.2, 0.01, day);
        const KernelDensity k = compute_kernel(p);
        const OptionSpec put{1.0, 0.995, day, OptionSide::put};
        const OptionSpec call{1.0, 0.995, day, OptionSide::call};
        const double parity =
            price_european(call, k) - price_european(put, k) - (1.0 - 0.995);
        rep.check("put-call parity <= 1e-6", std::abs(parity) <= 1e-6, short_num(parity));
        const double vol = implied_vol(price_european(atm, ModelParams(0.2, 0.0, day)), atm,
                                       VolConvention::normal);
        rep.check("flat normal vol at sigma within 1e-4", std::abs(vol - 0.2) <= 1e-4,
                  short_num(vol));
    }
    {
        ParticleConfig cfg;
        cfg.particles = 20000;
        cfg.steps = 50;
        const PathEnsemble e =
            run_particle_method(BlurringDensity::triangular(0.01), 0.2, day, cfg, 7, threads);
        const EnsembleStats s = ensemble_stats(e);
        rep.check("particle variance within 5% of sigma^2 t",
                  std::abs(s.variance / (0.04 * day) - 1.0) <= 0.05, short_num(s.variance));
        rep.check("particle skew negative", s.skewness < 0.0, short_num(s.skewness));
    }

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("validate: %d failure(s), %.1f s\n", rep.failures, secs);
    return rep.failures == 0 ? kExitOk : 1;
}

} // namespace
