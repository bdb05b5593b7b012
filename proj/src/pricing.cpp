#include "qsk/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace qsk {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double put_from_call(double call, const OptionSpec& spec) {
    return call - (spec.spot - spec.strike); // rate 0: C - P = S0 - K
}

} // namespace

void OptionSpec::validate() const {
    if (!(spot > 0.0)) throw DomainError("spot must be > 0");
    if (!(strike > 0.0)) throw DomainError("strike must be > 0");
    if (!(maturity > 0.0)) throw DomainError("maturity must be > 0");
}

double price_european(const OptionSpec& spec, const KernelDensity& kernel) {
    spec.validate();
    if (std::abs(kernel.params.horizon - spec.maturity) > 1e-12 * std::max(1.0, spec.maturity))
        throw ConfigError("kernel horizon does not match the option maturity");

    const double kx = spec.strike - spec.spot; // payoff kink in x-space
    if (kx > kernel.grid.node(kernel.grid.n() - 1)) {
        // strike above the grid: the call payoff is zero on the whole grid,
        // legitimate only if the upper tail is truly negligible
        const double peak = *std::max_element(kernel.values.begin(), kernel.values.end());
        if (kernel.values.back() > 1e-10 * peak)
            throw GridError("kernel grid does not cover the payoff support");
    }

    const auto& v = kernel.values;
    const double dx = kernel.grid.dx();
    double call = 0.0;
    for (int j = 0; j < kernel.grid.n(); ++j) {
        const double s = spec.spot + kernel.grid.node(j);
        if (s > spec.strike) call += v[j] * (s - spec.strike);
    }
    call *= dx;
    return spec.side == OptionSide::call ? call : put_from_call(call, spec);
}

double price_european(const OptionSpec& spec, const ModelParams& params) {
    spec.validate();
    const ModelParams p = params.with_horizon(spec.maturity);
    return price_european(spec, compute_kernel(p));
}

double reference_price(const OptionSpec& spec, double vol, VolConvention conv) {
    spec.validate();
    if (!(vol >= 0.0)) throw DomainError("vol must be >= 0");
    const double T = spec.maturity;
    double call;
    if (conv == VolConvention::normal) {
        const double v = vol * std::sqrt(T);
        if (v == 0.0) {
            call = std::max(spec.spot - spec.strike, 0.0);
        } else {
            const double d = (spec.spot - spec.strike) / v;
            call = (spec.spot - spec.strike) * norm_cdf(d) + v * norm_pdf(d);
        }
    } else {
        const double v = vol * std::sqrt(T);
        if (v == 0.0) {
            call = std::max(spec.spot - spec.strike, 0.0);
        } else {
            const double d1 = std::log(spec.spot / spec.strike) / v + 0.5 * v;
            call = spec.spot * norm_cdf(d1) - spec.strike * norm_cdf(d1 - v);
        }
    }
    return spec.side == OptionSide::call ? call : put_from_call(call, spec);
}

double implied_vol(double price, const OptionSpec& spec, VolConvention conv) {
    spec.validate();
    // no-arbitrage band for the given side/convention at rate 0
    const double intrinsic_call = std::max(spec.spot - spec.strike, 0.0);
    const double call_price =
        spec.side == OptionSide::call ? price : price + (spec.spot - spec.strike);
    const double upper = conv == VolConvention::lognormal
                             ? spec.spot
                             : std::numeric_limits<double>::infinity();
    if (!(call_price >= intrinsic_call - 1e-9 * spec.spot) || !(call_price < upper)) {
        std::ostringstream os;
        os << "price " << price << " outside no-arbitrage bounds";
        throw BoundsError(os.str());
    }

    OptionSpec call_spec = spec;
    call_spec.side = OptionSide::call;
    const double tol = 1e-10 * spec.spot;

    double lo = 0.0, hi = std::max(spec.spot, spec.strike) * 4.0 / std::sqrt(spec.maturity);
    while (reference_price(call_spec, hi, conv) < call_price) {
        hi *= 2.0;
        if (hi > 1e12) throw BoundsError("implied vol exceeds search bounds");
    }
    double v = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = reference_price(call_spec, v, conv) - call_price;
        if (std::abs(f) <= tol) return v;
        if (f > 0.0) {
            hi = v;
        } else {
            lo = v;
        }
        // Newton step, kept inside the bracket
        const double bump = std::max(1e-9, v * 1e-7);
        const double fp = (reference_price(call_spec, v + bump, conv) -
                           reference_price(call_spec, v - bump, conv)) /
                          (2.0 * bump);
        double next = (fp > 0.0) ? v - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        v = next;
    }
    return v;
}

SmileSurface build_smile(const ModelParams& params, double spot,
                         const std::vector<double>& maturities, const std::vector<double>& offsets,
                         VolConvention conv) {
    if (maturities.empty() || offsets.empty()) throw ConfigError("empty smile axes");
    for (double z : offsets)
        if (std::abs(z) > 4.0) throw ConfigError("strike offsets limited to +-4 stdev");
    for (std::size_t i = 1; i < maturities.size(); ++i)
        if (!(maturities[i] > maturities[i - 1]))
            throw ConfigError("maturities must be strictly increasing");

    SmileSurface s;
    s.spot = spot;
    s.convention = conv;
    s.maturities = maturities;
    s.offsets = offsets;
    s.strikes.resize(maturities.size());
    s.vols.resize(maturities.size());

    // maturities are independent jobs: one kernel each, then all strikes
    std::vector<std::exception_ptr> errors(maturities.size());
#pragma omp parallel for schedule(dynamic)
    for (long long mi = 0; mi < static_cast<long long>(maturities.size()); ++mi) {
        try {
            const double t = maturities[mi];
            const ModelParams p = params.with_horizon(t);
            const KernelDensity kernel = compute_kernel(p);
            const double sd = params.sigma * std::sqrt(t);
            s.strikes[mi].resize(offsets.size());
            s.vols[mi].resize(offsets.size());
            for (std::size_t zi = 0; zi < offsets.size(); ++zi) {
                const double strike = spot + offsets[zi] * sd;
                OptionSpec spec{spot, strike, t, OptionSide::call};
                double vol;
                try {
                    vol = implied_vol(price_european(spec, kernel), spec, conv);
                } catch (const Error& err) {
                    std::ostringstream os;
                    os << "smile node (t=" << t << ", strike=" << strike << "): " << err.what();
                    throw Error(err.code(), os.str());
                }
                s.strikes[mi][zi] = strike;
                s.vols[mi][zi] = vol;
            }
        } catch (...) {
            errors[mi] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return s;
}

std::vector<double> skew_term_structure(const SmileSurface& surface) {
    int bracket_lo = 0, bracket_hi = 0;
    for (double z : surface.offsets) {
        if (z < 0.0) ++bracket_lo;
        if (z > 0.0) ++bracket_hi;
    }
    if (surface.offsets.size() < 3 || bracket_lo == 0 || bracket_hi == 0)
        throw ConfigError("skew slope needs >= 3 strikes bracketing ATM");

    std::vector<double> slopes(surface.maturities.size());
    for (std::size_t mi = 0; mi < surface.maturities.size(); ++mi) {
        // least-squares line vol(z) = a + slope * z over the offsets
        double sz = 0.0, szz = 0.0, sv = 0.0, szv = 0.0;
        const double n = static_cast<double>(surface.offsets.size());
        for (std::size_t zi = 0; zi < surface.offsets.size(); ++zi) {
            const double z = surface.offsets[zi], v = surface.vols[mi][zi];
            sz += z;
            szz += z * z;
            sv += v;
            szv += z * v;
        }
        slopes[mi] = (n * szv - sz * sv) / (n * szz - sz * sz);
    }
    return slopes;
}

} // namespace qsk
