#include <cmath>

#include "doctest.h"
#include "qsk/geometry.hpp"

using namespace qsk;

TEST_CASE("flat-metric moments: printed formula") {
    const MomentSequence s = flat_metric_moments(0.01, 4);
    CHECK(s.values[0] == 1.0);
    CHECK(s.values[1] == doctest::Approx(0.01 / 3.0).epsilon(1e-14));
    CHECK(s.values[2] == doctest::Approx(1e-4 / 6.0).epsilon(1e-14));

    // parity: odd moments flip with eps, even ones do not
    const MomentSequence m = flat_metric_moments(-0.01, 4);
    CHECK(m.values[1] == doctest::Approx(-s.values[1]).epsilon(1e-14));
    CHECK(m.values[2] == doctest::Approx(s.values[2]).epsilon(1e-14));
}

TEST_CASE("exponential-metric moments: recurrence and residuals") {
    const double eps = 0.01, alpha = 2.0;
    const MomentSequence s = exp_metric_moments(eps, alpha, 8);
    CHECK(s.values[0] == 1.0);
    CHECK(s.values[1] == 0.0); // (4 H_0 - 4)/(2 alpha)
    CHECK(s.values[2] == doctest::Approx(-4.0 * eps / (3.0 * alpha)).epsilon(1e-14));

    // residual of the printed recurrence, relative to the equation scale
    double eps_pow = 1.0;
    for (int k = 2; k <= 8; ++k) {
        const double lhs = k * alpha * s.values[k - 1];
        const double rhs = 2.0 * k * (k - 1.0) * s.values[k - 2] - 4.0 * eps_pow;
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1.0});
        CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
        eps_pow *= eps;
    }

    CHECK_THROWS_AS(exp_metric_moments(eps, 0.0, 4), DomainError);
}

TEST_CASE("the recurrence is discontinuous at alpha = 0") {
    // H_1 vanishes identically for any alpha != 0 while the flat family has
    // H_1 = eps/3; H_2 diverges as alpha -> 0.
    const MomentSequence tiny = exp_metric_moments(0.01, 1e-6, 3);
    CHECK(tiny.values[1] == 0.0);
    CHECK(flat_metric_moments(0.01, 1).values[1] == doctest::Approx(0.01 / 3.0));
    CHECK(std::abs(tiny.values[2]) > 1e3);
}

TEST_CASE("triangular blur realizes the flat-metric moments") {
    for (double eps : {0.01, -0.01}) {
        const BlurringDensity b = BlurringDensity::triangular(eps);
        const MomentSequence ref = flat_metric_moments(eps, 8);
        for (int i = 0; i <= 8; ++i) {
            const double q = b.moment(i);
            const double scale = std::max(std::abs(ref.values[i]), 1e-300);
            CHECK(std::abs(q - ref.values[i]) / scale < 1e-10);
        }
        // spot values from the analytic integrals
        CHECK(b.moment(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(b.moment(1) - eps / 3.0) < 1e-10);
        CHECK(std::abs(b.moment(4) - 2.0 * std::pow(eps, 4) / 30.0) < 1e-12);
    }
    CHECK_THROWS_AS(BlurringDensity::triangular(0.0), DomainError);
}

TEST_CASE("kramers-moyal coefficients: flat metric reproduces the translation PDE") {
    const double sigma = 0.2, eps = 0.01;
    const BlurringDensity b = BlurringDensity::triangular(eps);
    const std::vector<double> xs{-0.3, 0.0, 0.7};
    const PDECoefficients c =
        kramers_moyal_coefficients(b, MetricProfile::flat(), sigma, 8, xs);

    for (double d : c.drift) CHECK(d == 0.0);
    double fact = 1.0; // k!
    for (int k = 2; k <= 8; ++k) {
        fact *= k;
        const double expected =
            sigma * sigma * ((k % 2 == 0) ? 1.0 : -1.0) * std::pow(eps, k - 2) / fact;
        for (double got : c.diffusion[k - 2]) {
            const double scale = std::max(std::abs(expected), 1e-300);
            CHECK(std::abs(got - expected) / scale < 1e-10);
        }
    }
    // k = 2 multiplier is sigma^2/2 exactly
    CHECK(c.diffusion[0][0] == doctest::Approx(0.5 * sigma * sigma).epsilon(1e-12));
}

TEST_CASE("kramers-moyal coefficients: exponential metric drift") {
    // drift = (sigma^2/4) d(g^-1)/dx H_0 with d(g^-1)/dx = alpha e^{alpha x}
    const BlurringDensity b = BlurringDensity::triangular(0.01);
    const PDECoefficients c = kramers_moyal_coefficients(
        b, MetricProfile::exponential(2.0), 0.2, 4, {0.0});
    CHECK(c.drift[0] == doctest::Approx(0.04 / 4.0 * 2.0).epsilon(1e-12)); // +0.02
}

TEST_CASE("connection terms collapse the general laplacian") {
    const std::vector<double> xs{-0.5, -0.1, 0.0, 0.3, 1.0};

    const ConnectionTerms flat = connection_terms(MetricProfile::flat(), xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(flat.a_x[i] == 0.0);
        CHECK(flat.q[i] == 0.0);
    }

    const double alpha = 2.0;
    const MetricProfile em = MetricProfile::exponential(alpha);
    const ConnectionTerms ec = connection_terms(em, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(ec.a_x[i] == doctest::Approx(-alpha / 2.0).epsilon(1e-10));
        CHECK(ec.q[i] ==
              doctest::Approx(-alpha * alpha / 4.0 * std::exp(alpha * xs[i])).epsilon(1e-8));
    }

    // expanded first- and zeroth-order coefficients vanish with these choices
    for (double x : xs) {
        const double g = em.g(x);
        const double h = 1e-6 * (1.0 + std::abs(x));
        auto w = [&](double xx) { return 1.0 / std::sqrt(em.g(xx)); };
        const double dw = (w(x + h) - w(x - h)) / (2.0 * h);
        const double a = -std::sqrt(g) * dw;
        const double da = 0.0; // constant connection for the exponential metric
        const double first = w(x) * dw + a / g;
        const double zeroth = a * a / g + da / g + (-a * a / g - da / g);
        CHECK(std::abs(first) < 1e-10);
        CHECK(std::abs(zeroth) < 1e-10);
    }
}

TEST_CASE("coordinate transform") {
    CHECK(coordinate_transform(MetricProfile::flat(), 0.5) == doctest::Approx(0.5).epsilon(1e-12));

    const MetricProfile em = MetricProfile::exponential(2.0);
    CHECK(coordinate_transform(em, 1.0) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-10));

    // strictly increasing in x
    double prev = coordinate_transform(em, -1.0);
    for (double x = -0.9; x <= 1.0; x += 0.1) {
        const double s = coordinate_transform(em, x);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("tabulated metric approximates the closed form") {
    std::vector<double> xs, gs;
    for (int i = 0; i <= 400; ++i) {
        const double x = -1.0 + 2.0 * i / 400.0;
        xs.push_back(x);
        gs.push_back(std::exp(-2.0 * x));
    }
    const MetricProfile tab = MetricProfile::tabulated(xs, gs);
    CHECK(tab.g(0.25) == doctest::Approx(std::exp(-0.5)).epsilon(1e-4));
    CHECK(tab.dg_inv(0.0) == doctest::Approx(2.0).epsilon(1e-3));
    const ConnectionTerms ct = connection_terms(tab, {0.0, 0.2});
    CHECK(ct.a_x[0] == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("metric fit: triangular blur returns the flat metric") {
    const double eps = 0.01;
    const MetricFit fit = fit_metric_weights(BlurringDensity::triangular(eps), eps, 8);
    CHECK(fit.feasible);
    for (double r : fit.residuals) CHECK(std::abs(r) <= 1e-10);
    for (double w : fit.w) CHECK(w == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("metric fit: point mass is reported infeasible") {
    const double eps = 0.01;
    const MetricFit fit = fit_metric_weights(BlurringDensity::point_mass(eps), eps, 4);
    CHECK_FALSE(fit.feasible);
    CHECK(fit.residuals.size() == 5);
    // i = 0 and i = 1 demand incompatible values of w(eps)
    double worst = 0.0;
    for (double r : fit.residuals) worst = std::max(worst, std::abs(r));
    CHECK(worst > 1e-2);
    for (double w : fit.w) CHECK(w >= 0.0);
}

TEST_CASE("metric fit: uniform blur is solved with nonnegative weights") {
    // The exact weight for this pair is w(y) = 4(eps - y)/eps on [0, eps] and
    // 0 beyond: the fit recovers that shape; the ~7e-6 residual floor is the
    // quadrature error across the kink, so the 1e-8 feasibility verdict is
    // honestly negative.
    const double eps = 0.01;
    const MetricFit fit = fit_metric_weights(BlurringDensity::uniform(0.0, 2.0 * eps), eps, 6);
    for (double w : fit.w) CHECK(w >= 0.0);
    CHECK(fit.residuals.size() == 7);
    CHECK_FALSE(fit.feasible);

    // regression locks, frozen from the first computation
    double worst = 0.0, wmax = 0.0, wsum = 0.0;
    for (double r : fit.residuals) worst = std::max(worst, std::abs(r));
    for (double w : fit.w) {
        wmax = std::max(wmax, w);
        wsum += w;
    }
    CHECK(worst == doctest::Approx(7.0193907604e-06).epsilon(1e-6));
    CHECK(wmax == doctest::Approx(4.2945772584).epsilon(1e-9));
    CHECK(wsum / fit.w.size() == doctest::Approx(1.2043519788).epsilon(1e-9));
    CHECK(fit.w[fit.w.size() / 2] == 0.0); // beyond the kink the weight vanishes
}

TEST_CASE("order cap for conditioning") {
    CHECK_THROWS_AS(fit_metric_weights(BlurringDensity::triangular(0.01), 0.01, 13), ConfigError);
}
