#include <cmath>

#include "doctest.h"
#include "qsk/pricing.hpp"

using namespace qsk;

namespace {
const double kDay = 1.0 / 252;
}

TEST_CASE("ATM bachelier price in the gaussian model") {
    const ModelParams p(0.2, 0.0, kDay);
    const OptionSpec atm{1.0, 1.0, kDay, OptionSide::call};
    const double price = price_european(atm, p);
    // closed form sqrt(sigma^2 t / 2 pi)
    const double closed = std::sqrt(0.04 * kDay / (2.0 * M_PI));
    CHECK(price == doctest::Approx(closed).epsilon(1e-7));
    CHECK(closed == doctest::Approx(5.026248e-3).epsilon(1e-6));
}

TEST_CASE("deep in-the-money call converges to spot minus strike") {
    const ModelParams p(0.2, 0.01, kDay);
    const OptionSpec deep{1.0, 0.5, kDay, OptionSide::call};
    CHECK(price_european(deep, p) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("put-call parity at zero rate") {
    for (double eps : {0.0, 0.01, -0.005}) {
        const ModelParams p(0.2, eps, kDay);
        const KernelDensity k = compute_kernel(p);
        for (double strike : {0.98, 1.0, 1.013}) {
            const OptionSpec c{1.0, strike, kDay, OptionSide::call};
            const OptionSpec q{1.0, strike, kDay, OptionSide::put};
            const double parity =
                price_european(c, k) - price_european(q, k) - (1.0 - strike);
            CHECK(std::abs(parity) < 1e-6);
        }
    }
}

TEST_CASE("call price is monotone and convex in strike") {
    const ModelParams p(0.2, 0.01, kDay);
    const KernelDensity k = compute_kernel(p);
    std::vector<double> prices;
    for (int i = 0; i <= 20; ++i) {
        const double strike = 0.97 + 0.003 * i;
        prices.push_back(price_european({1.0, strike, kDay, OptionSide::call}, k));
    }
    for (std::size_t i = 1; i < prices.size(); ++i) CHECK(prices[i] <= prices[i - 1] + 1e-14);
    for (std::size_t i = 1; i + 1 < prices.size(); ++i)
        CHECK(prices[i + 1] - 2.0 * prices[i] + prices[i - 1] >= -1e-12);
}

TEST_CASE("implied vol: flat at sigma in the gaussian model") {
    const ModelParams p(0.2, 0.0, kDay);
    const KernelDensity k = compute_kernel(p);
    const double sd = 0.2 * std::sqrt(kDay);
    for (double z : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const OptionSpec spec{1.0, 1.0 + z * sd, kDay, OptionSide::call};
        const double vol = implied_vol(price_european(spec, k), spec, VolConvention::normal);
        CHECK(std::abs(vol - 0.2) < 1e-4);
    }
}

TEST_CASE("implied vol: round trip and bounds") {
    const OptionSpec spec{1.0, 1.01, 0.5, OptionSide::call};
    for (auto conv : {VolConvention::normal, VolConvention::lognormal}) {
        const double price = reference_price(spec, 0.21, conv);
        const double vol = implied_vol(price, spec, conv);
        CHECK(vol == doctest::Approx(0.21).epsilon(1e-8));
        CHECK(reference_price(spec, vol, conv) == doctest::Approx(price).epsilon(1e-10));
    }
    CHECK_THROWS_AS(implied_vol(-0.01, spec, VolConvention::normal), BoundsError);
    CHECK_THROWS_AS(implied_vol(1.2, spec, VolConvention::lognormal), BoundsError);
}

TEST_CASE("translation fattens the put wing but barely moves ATM") {
    const ModelParams p0(0.2, 0.0, kDay);
    const ModelParams p1(0.2, 0.01, kDay);
    const OptionSpec atm{1.0, 1.0, kDay, OptionSide::call};
    const double a0 = price_european(atm, p0);
    const double a1 = price_european(atm, p1);
    // the exact-law ATM shift is 2.52%: small next to the wing repricing below
    CHECK(std::abs(a1 - a0) / a0 < 0.03);

    const double sd = 0.2 * std::sqrt(kDay);
    const OptionSpec otm_put{1.0, 1.0 - 2.0 * sd, kDay, OptionSide::put};
    CHECK(price_european(otm_put, p1) > price_european(otm_put, p0));
}

TEST_CASE("smile: flat for eps = 0 and mirrored under eps -> -eps") {
    const std::vector<double> mats{kDay};
    // offsets stay inside the arbitrage-interior region of the one-day law
    // (beyond the last atom a wing price sits on the intrinsic bound and the
    // implied vol is pinned at zero)
    const std::vector<double> offsets{-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};

    const SmileSurface flat =
        build_smile(ModelParams(0.2, 0.0, kDay), 1.0, mats, offsets);
    for (double v : flat.vols[0]) CHECK(std::abs(v - 0.2) < 1e-4);

    const SmileSurface up = build_smile(ModelParams(0.2, 0.01, kDay), 1.0, mats, offsets);
    const SmileSurface dn = build_smile(ModelParams(0.2, -0.01, kDay), 1.0, mats, offsets);
    const std::size_t m = offsets.size();
    for (std::size_t i = 0; i < m; ++i)
        CHECK(std::abs(up.vols[0][i] - dn.vols[0][m - 1 - i]) < 1e-6);

    // short-maturity smile is visibly skewed; the one-year smile is near flat
    const double tilt_day = up.vols[0].front() - up.vols[0].back();
    const SmileSurface year = build_smile(ModelParams(0.2, 0.01, kDay), 1.0, {1.0}, offsets);
    const double tilt_year = year.vols[0].front() - year.vols[0].back();
    CHECK(tilt_day > 5.0 * tilt_year);
    CHECK(tilt_year > 0.0);
}

TEST_CASE("skew term structure: sign and 1/sqrt(t) flattening") {
    const std::vector<double> offsets{-1.0, -0.5, 0.0, 0.5, 1.0};
    const SmileSurface s =
        build_smile(ModelParams(0.2, 0.01, kDay), 1.0, {kDay, 1.0}, offsets);
    const auto slopes = skew_term_structure(s);
    CHECK(slopes[0] < 0.0);
    CHECK(slopes[1] < 0.0);
    CHECK(std::abs(slopes[0]) > std::abs(slopes[1]));
    CHECK(slopes[0] / slopes[1] == doctest::Approx(std::sqrt(252.0)).epsilon(0.15));

    const SmileSurface flat =
        build_smile(ModelParams(0.2, 0.0, kDay), 1.0, {kDay}, offsets);
    CHECK(std::abs(skew_term_structure(flat)[0]) < 1e-4);
}

TEST_CASE("smile configuration errors") {
    const ModelParams p(0.2, 0.0, kDay);
    CHECK_THROWS_AS(build_smile(p, 1.0, {}, {0.0}), ConfigError);
    CHECK_THROWS_AS(build_smile(p, 1.0, {kDay}, {-5.0, 0.0, 5.0}), ConfigError);

    SmileSurface s = build_smile(p, 1.0, {kDay}, {-0.5, 0.0, 0.5});
    s.offsets = {0.0, 0.5, 1.0}; // nothing below ATM
    CHECK_THROWS_AS(skew_term_structure(s), ConfigError);
}

TEST_CASE("option spec validation") {
    const OptionSpec bad_spot{0.0, 1.0, 1.0, OptionSide::call};
    const OptionSpec bad_strike{1.0, -1.0, 1.0, OptionSide::call};
    const OptionSpec bad_mat{1.0, 1.0, 0.0, OptionSide::call};
    CHECK_THROWS_AS(bad_spot.validate(), DomainError);
    CHECK_THROWS_AS(bad_strike.validate(), DomainError);
    CHECK_THROWS_AS(bad_mat.validate(), DomainError);
}

TEST_CASE("pricing rejects strikes beyond an inadequate grid") {
    // a grid that passes the kernel's own boundary check (4.5e-9 of peak at
    // the edge) but leaves too much tail for a strike above its upper end
    const ModelParams p(0.2, 0.0, kDay);
    const double st = 0.2 * std::sqrt(kDay);
    const KernelDensity k = compute_kernel(p, SpatialGrid::centered(6.2 * st, 1024));
    const OptionSpec far{1.0, 1.0 + 7.0 * st, kDay, OptionSide::call};
    CHECK_THROWS_AS(price_european(far, k), GridError);
}
