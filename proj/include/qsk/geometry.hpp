#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qsk/errors.hpp"

namespace qsk {

/// Moments H_0..H_N of a blurring density, with the parameters that
/// generated them (alpha = 0 marks the flat-metric family).
struct MomentSequence {
    double epsilon = 0.0;
    double alpha = 0.0;
    std::vector<double> values;
};

/// Flat-metric blurring moments: H_i = 2 eps^i / ((i+1)(i+2)).
MomentSequence flat_metric_moments(double epsilon, int order);

/// Exponential-metric (g = exp(-alpha x)) blurring moments via the
/// recurrence H_{k-1} = (2k(k-1) H_{k-2} - 4 eps^{k-2}) / (k alpha), H_0 = 1.
/// The recurrence is discontinuous at alpha = 0; callers wanting the flat
/// family must use flat_metric_moments (alpha = 0 here is an error).
MomentSequence exp_metric_moments(double epsilon, double alpha, int order);

/// Nonnegative density with compact support and an exact evaluator; the
/// closed-form realizations keep quadrature exact for polynomial moments.
class BlurringDensity {
public:
    /// h(y) = 2(eps - y)/eps^2 on [0, eps] (mirrored onto [eps, 0] for
    /// eps < 0); its i-th moment is exactly 2 eps^i/((i+1)(i+2)).
    static BlurringDensity triangular(double epsilon);
    static BlurringDensity uniform(double lo, double hi);
    /// Degenerate unit mass at a point (moments eps^i); pdf() is not usable.
    static BlurringDensity point_mass(double at);
    /// Arbitrary tabulated density (linear interpolation), normalized.
    static BlurringDensity tabulated(std::vector<double> y, std::vector<double> h);

    double support_lo() const { return lo_; }
    double support_hi() const { return hi_; }
    bool is_point_mass() const { return point_; }
    double pdf(double y) const;

    /// i-th raw moment by 64-node Gauss-Legendre quadrature on the support
    /// (exact for the closed forms up to high polynomial order).
    double moment(int i) const;

    /// Tabulated view over the support, n nodes (serialization/particle use).
    std::vector<std::pair<double, double>> table(int n = 2048) const;

private:
    BlurringDensity() = default;
    double lo_ = 0.0, hi_ = 0.0;
    bool point_ = false;
    std::function<double(double)> pdf_;
};

/// One-dimensional metric g(x) > 0 with reference point x0: closed-form
/// flat / exponential families, or a tabulated profile (central-difference
/// derivatives).
class MetricProfile {
public:
    static MetricProfile flat();
    static MetricProfile exponential(double alpha, double x0 = 0.0);
    static MetricProfile tabulated(std::vector<double> x, std::vector<double> g, double x0 = 0.0);

    double g(double x) const;
    double g_inv(double x) const;
    double dg_inv(double x) const; // d(1/g)/dx
    double x0() const { return x0_; }
    bool closed_form() const { return kind_ != Kind::tab; }

private:
    enum class Kind { flat, exp, tab };
    Kind kind_ = Kind::flat;
    double alpha_ = 0.0, x0_ = 0.0;
    std::vector<double> tx_, tg_;
    double interp_g(double x) const;
};

/// Drift and per-order diffusion multipliers of the expanded equation:
/// drift = (sigma^2/4) d(g^-1)/dx H_0,
/// c_k   = (sigma^2/2) [ (-1)^k g^-1 H_{k-2}/(k-2)!
///                       + (-1)^{k-1} d(g^-1)/dx H_{k-1}/(2 (k-1)!) ].
struct PDECoefficients {
    std::vector<double> x;
    std::vector<double> drift;
    std::vector<std::vector<double>> diffusion; // diffusion[k-2] holds c_k, k = 2..K
};

PDECoefficients kramers_moyal_coefficients(const BlurringDensity& blur, const MetricProfile& metric,
                                           double sigma, int order, const std::vector<double>& x_grid);

/// Abelian connection A_x = -g^{1/2} d(g^{-1/2})/dx and section
/// Q = -A_x^2/g - (1/g) dA_x/dx that collapse the general Laplacian to
/// (1/g) d^2/dx^2.
struct ConnectionTerms {
    std::vector<double> x, a_x, q;
};
ConnectionTerms connection_terms(const MetricProfile& metric, const std::vector<double>& x_grid);

/// Arc-length coordinate s(x) = int_{x0}^{x} g(y)^{-1/2} dy.
double coordinate_transform(const MetricProfile& metric, double x);

/// Result of the moment-constrained weight fit for w(y) = g(y)^{-1/2}.
struct MetricFit {
    std::vector<double> y;         // quadrature nodes on the support of H
    std::vector<double> w;         // fitted nonnegative weights
    std::vector<double> residuals; // per-equation moment residuals (scaled units)
    bool feasible = false;
    double tolerance = 0.0;
};

/// Solve the moment equations int y^i H(y) w(y) dy = 2 eps^i/((i+1)(i+2)),
/// i = 0..order, as a nonnegativity-constrained least squares problem with a
/// small Tikhonov pull toward w = 1.  Never fabricates a metric: when the
/// residuals stay above tolerance the fit is reported infeasible.
MetricFit fit_metric_weights(const BlurringDensity& blur, double epsilon, int order);

} // namespace qsk
