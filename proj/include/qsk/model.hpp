#pragma once

#include <complex>

#include "qsk/errors.hpp"

namespace qsk {

/// Model triple of the translated diffusion: absolute volatility sigma
/// (x per sqrt(year)), translation length epsilon (x units, any sign) and
/// horizon in years.
///
/// Sign convention, fixed once for the whole library: the transition law at
/// horizon t has characteristic function E[exp(i p X_t)] = exp(t * m(p)) with
/// m(p) = (sigma^2/eps^2) * (exp(-i*eps*p) + i*eps*p - 1),
/// so the cumulants are kappa_k = t * sigma^2 * (-eps)^(k-2): positive eps
/// gives negative skew. For eps != 0 this is a compensated jump law with
/// jump size -eps at rate sigma^2/eps^2; eps = 0 is exactly Gaussian.
struct ModelParams {
    double sigma;
    double epsilon;
    double horizon;

    ModelParams(double sigma_, double epsilon_, double horizon_)
        : sigma(sigma_), epsilon(epsilon_), horizon(horizon_) {
        validate();
    }

    void validate() const;

    /// |eps| / (sigma^2 t): how strongly non-Gaussian the horizon-t law is.
    double quantumness() const { return std::abs(epsilon) / (sigma * sigma * horizon); }

    /// Jump intensity sigma^2/eps^2 (requires eps != 0).
    double jump_rate() const;

    /// Expected jump count over the horizon.
    double jump_count() const { return jump_rate() * horizon; }

    ModelParams with_horizon(double t) const { return {sigma, epsilon, t}; }
};

/// Evaluation mode for the power-series symbols: the exact resummed closed
/// form, or the series truncated after the k = K term (K >= 2; the series
/// starts at k = 2).
struct TruncationSpec {
    static TruncationSpec closed_form() { return TruncationSpec{false, 0}; }
    static TruncationSpec series(int order) {
        if (order < 2) throw ConfigError("series truncation requires K >= 2");
        return TruncationSpec{true, order};
    }

    bool is_series = false;
    int order = 0;
};

/// Characteristic exponent m(p): the transition law satisfies
/// E[exp(ipX_t)] = exp(t m(p)).  Closed form
/// (sigma^2/eps^2)(e^{-i eps p} + i eps p - 1); series form
/// sigma^2 sum_{k=2..K} (-ip)^k eps^{k-2}/k!.  Re m <= 0 in closed form.
std::complex<double> characteristic_exponent(double p, const ModelParams& params,
                                             const TruncationSpec& trunc = TruncationSpec::closed_form());

/// Dispersion omega(p) of the plane-wave solutions exp(i(px - omega t)) of
/// the Schroedinger-picture equation: omega(p) = i sigma^2 (e^{eps p} - eps p - 1)/eps^2.
/// Purely imaginary for real p.
std::complex<double> dispersion_omega(double p, const ModelParams& params);

/// Analytic continuation of omega to complex argument.  Satisfies the
/// double-rotation identity m(p) = -i * omega(-i p), which maps the
/// Schroedinger kernel exponent onto the transition-law exponent.
std::complex<double> dispersion_omega(std::complex<double> p, const ModelParams& params);

/// Stationary momentum of the Legendre transform:
/// p0(xdot) = ln(1 + eps xdot / sigma^2) / eps, with a series branch near
/// eps*xdot/sigma^2 = 0 so that the eps -> 0 limit xdot/sigma^2 is exact.
/// Requires eps*xdot/sigma^2 > -1.
double stationary_momentum(double xdot, const ModelParams& params);

/// Momentum-space Hamiltonian of the Legendre pair at fixed velocity:
/// h(p) = p*xdot - sigma^2 (e^{eps p} - eps p - 1)/eps^2.  The Lagrangian is
/// its Legendre transform, L(xdot) = p0*xdot - h-part at p0.
double legendre_hamiltonian(double p, double xdot, const ModelParams& params);

/// Velocity Lagrangian
/// L(xdot) = sum_{k>=0} (-eps)^k xdot^{k+2} / (sigma^{2(k+1)} (k+1)(k+2)).
/// Closed form (sigma^2/eps^2)[(1+u)ln(1+u) - u], u = eps*xdot/sigma^2.
/// Series mode returns the first-K-terms partial sum (k = 0..K-1) and
/// requires |u| < 1; closed form requires u > -1.
double lagrangian(double xdot, const ModelParams& params,
                  const TruncationSpec& trunc = TruncationSpec::closed_form());

} // namespace qsk
