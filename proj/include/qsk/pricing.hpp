#pragma once

#include <vector>

#include "qsk/kernel.hpp"
#include "qsk/model.hpp"

namespace qsk {

enum class OptionSide { call, put };
enum class VolConvention { normal, lognormal };

/// European option under the displacement model S_T = S0 + X_T, rate 0.
struct OptionSpec {
    double spot;
    double strike;
    double maturity; // years
    OptionSide side = OptionSide::call;

    void validate() const;
};

/// E[payoff(S0 + X)] against the kernel's node masses (exact expectation of
/// the grid law).  The kernel's horizon must match spec.maturity.
double price_european(const OptionSpec& spec, const KernelDensity& kernel);

/// Convenience: builds the kernel at spec.maturity on auto_grid.
double price_european(const OptionSpec& spec, const ModelParams& params);

/// Bachelier (normal) and Black-Scholes (lognormal) pricing at rate 0.
double reference_price(const OptionSpec& spec, double vol, VolConvention conv);

/// Invert reference_price by safeguarded Newton/bisection to
/// |price error| <= 1e-10 * spot.  Prices outside the no-arbitrage band for
/// the convention raise a BoundsError.
double implied_vol(double price, const OptionSpec& spec, VolConvention conv);

/// Implied-vol surface on standardized strike offsets: the strike at
/// maturity t and offset z is S0 + z * sigma * sqrt(t).
struct SmileSurface {
    double spot = 0.0;
    VolConvention convention = VolConvention::normal;
    std::vector<double> maturities;
    std::vector<double> offsets;                 // in stdev units
    std::vector<std::vector<double>> strikes;    // [maturity][offset]
    std::vector<std::vector<double>> vols;       // [maturity][offset]
};

SmileSurface build_smile(const ModelParams& params, double spot,
                         const std::vector<double>& maturities, const std::vector<double>& offsets,
                         VolConvention conv = VolConvention::normal);

/// Per-maturity ATM slope of the smile against the standardized offset axis
/// (vol per stdev), by least squares over the offsets.  Needs at least
/// 3 strikes bracketing ATM.
std::vector<double> skew_term_structure(const SmileSurface& surface);

} // namespace qsk
