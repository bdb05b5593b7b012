#include "qsk/model.hpp"

#include <cmath>
#include <limits>

namespace qsk {

namespace {

constexpr std::complex<double> I{0.0, 1.0};

// expm1 for complex argument: exp(z) - 1 without cancellation for small |z|.
std::complex<double> cexpm1(std::complex<double> z) {
    if (std::abs(z) < 0.5) {
        std::complex<double> term = z;
        std::complex<double> sum = z;
        for (int k = 2; k <= 24; ++k) {
            term *= z / static_cast<double>(k);
            sum += term;
            if (std::abs(term) < 1e-20 * (1.0 + std::abs(sum))) break;
        }
        return sum;
    }
    return std::exp(z) - 1.0;
}

// exp(u) - u - 1 for real u, stable near zero.
double expm1m(double u) {
    if (std::abs(u) < 1e-4) {
        // 3-term branch: u^2/2 + u^3/6 + u^4/24
        return u * u * (0.5 + u * (1.0 / 6.0 + u / 24.0));
    }
    return std::expm1(u) - u;
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

} // namespace

void ModelParams::validate() const {
    require_finite(sigma, "sigma");
    require_finite(epsilon, "epsilon");
    require_finite(horizon, "horizon");
    if (sigma <= 0.0) throw DomainError("sigma must be > 0");
    if (horizon <= 0.0) throw DomainError("horizon must be > 0");
}

double ModelParams::jump_rate() const {
    if (epsilon == 0.0) throw DomainError("jump rate undefined for epsilon = 0");
    return sigma * sigma / (epsilon * epsilon);
}

std::complex<double> characteristic_exponent(double p, const ModelParams& params,
                                             const TruncationSpec& trunc) {
    require_finite(p, "p");
    const double s2 = params.sigma * params.sigma;
    if (trunc.is_series) {
        // sigma^2 sum_{k=2..K} (-ip)^k eps^{k-2} / k!
        const std::complex<double> z = -I * p;
        std::complex<double> term = z * z / 2.0; // k = 2
        std::complex<double> sum = term;
        for (int k = 3; k <= trunc.order; ++k) {
            term *= z * params.epsilon / static_cast<double>(k);
            sum += term;
        }
        return s2 * sum;
    }
    if (params.epsilon == 0.0) return {-0.5 * s2 * p * p, 0.0};
    const double eps = params.epsilon;
    const std::complex<double> u = -I * (eps * p);
    // (e^u - 1) + (-u) = e^{-i eps p} + i eps p - 1, cancellation-free
    return s2 / (eps * eps) * (cexpm1(u) - u);
}

std::complex<double> dispersion_omega(std::complex<double> p, const ModelParams& params) {
    const double s2 = params.sigma * params.sigma;
    if (params.epsilon == 0.0) return I * 0.5 * s2 * p * p;
    const double eps = params.epsilon;
    const std::complex<double> u = eps * p;
    return I * s2 / (eps * eps) * (cexpm1(u) - u);
}

std::complex<double> dispersion_omega(double p, const ModelParams& params) {
    require_finite(p, "p");
    return dispersion_omega(std::complex<double>(p, 0.0), params);
}

double stationary_momentum(double xdot, const ModelParams& params) {
    require_finite(xdot, "xdot");
    const double s2 = params.sigma * params.sigma;
    if (params.epsilon == 0.0) return xdot / s2;
    const double u = params.epsilon * xdot / s2;
    if (u <= -1.0) throw DomainError("stationary momentum undefined: eps*xdot/sigma^2 <= -1");
    if (std::abs(u) < 1e-4) {
        // ln(1+u)/eps = (xdot/sigma^2)(1 - u/2 + u^2/3 - ...)
        return xdot / s2 * (1.0 - u / 2.0 + u * u / 3.0);
    }
    return std::log1p(u) / params.epsilon;
}

double legendre_hamiltonian(double p, double xdot, const ModelParams& params) {
    require_finite(p, "p");
    const double s2 = params.sigma * params.sigma;
    if (params.epsilon == 0.0) return p * xdot - 0.5 * s2 * p * p;
    const double eps = params.epsilon;
    return p * xdot - s2 / (eps * eps) * expm1m(eps * p);
}

double lagrangian(double xdot, const ModelParams& params, const TruncationSpec& trunc) {
    require_finite(xdot, "xdot");
    const double s2 = params.sigma * params.sigma;
    const double u = params.epsilon * xdot / s2;
    if (trunc.is_series) {
        if (std::abs(u) >= 1.0)
            throw ConvergenceError("Lagrangian series diverges: |eps*xdot/sigma^2| >= 1");
        // k-th term: (-u)^k * xdot^2 / (sigma^2 (k+1)(k+2)), k = 0..K-1
        const double scale = xdot * xdot / s2;
        double pw = 1.0;
        double sum = 0.0;
        for (int k = 0; k < trunc.order; ++k) {
            sum += pw * scale / ((k + 1.0) * (k + 2.0));
            pw *= -u;
        }
        return sum;
    }
    if (u <= -1.0) throw DomainError("Lagrangian logarithm branch: eps*xdot/sigma^2 <= -1");
    if (params.epsilon == 0.0 || std::abs(u) < 1e-4) {
        // (sigma^2/eps^2)[(1+u)ln(1+u) - u] = (xdot^2/sigma^2)(1/2 - u/6 + u^2/12 - ...)
        return xdot * xdot / s2 * (0.5 - u / 6.0 + u * u / 12.0);
    }
    const double e2 = params.epsilon * params.epsilon;
    return s2 / e2 * ((1.0 + u) * std::log1p(u) - u);
}

} // namespace qsk
