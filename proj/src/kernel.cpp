#include "qsk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "qsk/fft.hpp"

namespace qsk {

namespace {

constexpr double kMassTol = 1e-4;
constexpr double kNegativityTol = 1e-9;
constexpr double kBoundaryTol = 1e-8;

int next_pow2(double x) {
    int n = 64;
    while (n < x) {
        n <<= 1;
        if (n > (1 << 22)) throw GridError("auto grid would need more than 2^22 nodes");
    }
    return n;
}

double min_width(const ModelParams& p) {
    double w = 12.0 * p.sigma * std::sqrt(p.horizon);
    if (p.epsilon != 0.0) w += 6.0 * p.sigma * p.sigma * p.horizon / std::abs(p.epsilon);
    return w;
}

// Smallest L for which L * (expected jump count) is an integer, i.e. both the
// jump lattice and the compensator drift land on grid nodes when dx = |eps|/L.
int commensurate_factor(double jump_count) {
    for (int L = 1; L <= 8192; ++L) {
        const double r = L * jump_count;
        if (std::abs(r - std::round(r)) <= 1e-7 + 1e-12 * r) return L;
    }
    return 0;
}

std::vector<double> propagate(const std::vector<double>& initial, const SpatialGrid& grid,
                              const std::vector<std::complex<double>>& multiplier) {
    std::vector<std::complex<double>> a(initial.begin(), initial.end());
    ifft(a);
    for (int k = 0; k < grid.n(); ++k) a[k] *= multiplier[k];
    fft(a);
    std::vector<double> out(grid.n());
    for (int j = 0; j < grid.n(); ++j) out[j] = a[j].real();
    return out;
}

void clip_and_check(std::vector<double>& v, const char* what) {
    // Density units scale like 1/dx, so ringing does too: the tolerance is
    // the fixed floor widened by a 1e-8-of-peak allowance (interpolation
    // ringing on off-lattice grids), still orders of magnitude below any
    // aliasing failure.
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    const double tol = std::max(kNegativityTol, 1e-8 * peak);
    double most_negative = 0.0;
    for (double& x : v) {
        if (x < 0.0) {
            most_negative = std::min(most_negative, x);
            if (x > -tol) x = 0.0;
        }
    }
    if (most_negative < -tol) {
        std::ostringstream os;
        os << what << ": negative density " << most_negative
           << " exceeds the ringing tolerance " << -tol;
        throw ValidationError(os.str());
    }
}

void check_mass(const KernelDensity& k, const char* what) {
    const double m = k.mass();
    if (std::abs(m - 1.0) > kMassTol) {
        std::ostringstream os;
        os << what << ": kernel mass " << m << " outside 1 +- " << kMassTol;
        throw ValidationError(os.str());
    }
}

} // namespace

double KernelDensity::mass() const {
    double s = 0.0;
    for (std::size_t j = 1; j < values.size(); ++j) s += 0.5 * (values[j - 1] + values[j]);
    return s * grid.dx();
}

const std::vector<double>& KernelDensity::prefix_mass() const {
    if (prefix_.empty()) {
        prefix_.resize(values.size());
        double c = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            c += values[j] * grid.dx();
            prefix_[j] = c;
        }
    }
    return prefix_;
}

double KernelDensity::cdf(double x) const {
    const auto& c = prefix_mass();
    const double total = c.back();
    if (x < grid.node(0)) return 0.0;
    const int j = std::min<int>(static_cast<int>(std::floor((x - grid.x_min()) / grid.dx() + 1e-9)),
                                grid.n() - 1);
    return c[j] / total;
}

SpatialGrid auto_grid(const ModelParams& params) {
    const double st = params.sigma * std::sqrt(params.horizon);
    if (params.epsilon == 0.0) return SpatialGrid::centered(12.0 * st, 8192);

    const double abs_eps = std::abs(params.epsilon);
    int L = commensurate_factor(params.jump_count());
    if (L == 0) L = 64; // no small commensurate factor; fall back to resolution only
    while (st / (abs_eps / L) < 64.0) L *= 2;
    const double dx = abs_eps / L;
    const int n = next_pow2(min_width(params) / dx);
    return SpatialGrid::with_spacing(dx, n);
}

KernelDensity compute_kernel(const ModelParams& params, const SpatialGrid& grid) {
    if (grid.n() * grid.dx() < min_width(params) * (1.0 - 1e-12)) {
        std::ostringstream os;
        os << "grid width " << grid.n() * grid.dx() << " below required "
           << min_width(params) << "; widen the grid or use auto_grid";
        throw GridError(os.str());
    }
    std::vector<std::complex<double>> mult(grid.n());
    for (int k = 0; k < grid.n(); ++k)
        mult[k] = std::exp(params.horizon * characteristic_exponent(grid.wavenumber(k), params));
    KernelDensity out{grid, propagate(delta_density(grid), grid, mult), params,
                      KernelMethod::fourier, 0, 0};

    const double peak = *std::max_element(out.values.begin(), out.values.end());
    const double boundary = std::max(std::abs(out.values.front()), std::abs(out.values.back()));
    if (boundary > kBoundaryTol * peak) {
        std::ostringstream os;
        os << "aliasing detected: boundary density " << boundary << " vs peak " << peak
           << "; suggested bounds +-" << 0.75 * grid.n() * grid.dx();
        throw GridError(os.str());
    }
    clip_and_check(out.values, "compute_kernel");
    check_mass(out, "compute_kernel");
    return out;
}

KernelDensity compute_kernel(const ModelParams& params) {
    return compute_kernel(params, auto_grid(params));
}

double CumulantSet::skewness() const { return k3 / (k2 * std::sqrt(k2)); }
double CumulantSet::excess_kurtosis() const { return k4 / (k2 * k2); }

CumulantSet analytic_cumulants(const ModelParams& params) {
    const double s2t = params.sigma * params.sigma * params.horizon;
    return {s2t, -params.epsilon * s2t, params.epsilon * params.epsilon * s2t};
}

std::vector<double> empirical_moments(const KernelDensity& kernel, int max_order) {
    if (max_order < 1 || max_order > 6) throw ConfigError("moment order must be in 1..6");
    if (std::abs(kernel.mass() - 1.0) > kMassTol)
        throw ValidationError("empirical_moments requires a normalized kernel");

    const auto& v = kernel.values;
    const int n = kernel.grid.n();
    const double dx = kernel.grid.dx();
    auto trapz = [&](auto f) {
        double s = 0.0;
        for (int j = 1; j < n; ++j)
            s += 0.5 * (f(j - 1) + f(j));
        return s * dx;
    };
    const double mean = trapz([&](int j) { return kernel.grid.node(j) * v[j]; });
    std::vector<double> out(max_order);
    for (int k = 1; k <= max_order; ++k)
        out[k - 1] = trapz([&](int j) { return std::pow(kernel.grid.node(j) - mean, k) * v[j]; });
    out[0] = mean; // first central moment of the raw grid law is the mean about 0
    return out;
}

KernelDensity compose(const KernelDensity& a, const KernelDensity& b) {
    if (!(a.grid == b.grid)) throw CompositionError("compose requires identical grids");
    if (a.params.sigma != b.params.sigma || a.params.epsilon != b.params.epsilon)
        throw CompositionError("compose requires identical (sigma, epsilon)");

    const int n = a.grid.n();
    std::vector<double> c = circular_convolve(a.values, b.values);
    std::vector<double> vals(n);
    // node j of each operand sits at (j - n/2)dx, so the plain circular
    // convolution is offset by n/2 cells.
    for (int m = 0; m < n; ++m) vals[m] = a.grid.dx() * c[(m + n / 2) % n];

    KernelDensity out{a.grid, std::move(vals),
                      ModelParams(a.params.sigma, a.params.epsilon, a.params.horizon + b.params.horizon),
                      KernelMethod::composed, 0, 0};
    clip_and_check(out.values, "compose");
    check_mass(out, "compose");
    return out;
}

std::vector<double> delta_density(const SpatialGrid& grid) {
    std::vector<double> v(grid.n(), 0.0);
    v[grid.zero_node()] = 1.0 / grid.dx();
    return v;
}

KernelDensity spectral_propagate(const std::vector<double>& initial, const SpatialGrid& grid,
                                 const ModelParams& params, const TruncationSpec& trunc, double t,
                                 bool enable_filter) {
    if (static_cast<int>(initial.size()) != grid.n())
        throw ConfigError("initial density length does not match the grid");
    if (!(t > 0.0)) throw DomainError("propagation time must be > 0");

    std::vector<std::complex<double>> symbol(grid.n());
    for (int k = 0; k < grid.n(); ++k)
        symbol[k] = characteristic_exponent(grid.wavenumber(k), params, trunc);

    // Stability of the truncation on this band.
    double bad_lo = 0.0, bad_hi = 0.0;
    int unstable = 0;
    for (int k = 0; k < grid.n(); ++k) {
        if (symbol[k].real() > 0.0) {
            const double ap = std::abs(grid.wavenumber(k));
            if (unstable == 0) {
                bad_lo = bad_hi = ap;
            } else {
                bad_lo = std::min(bad_lo, ap);
                bad_hi = std::max(bad_hi, ap);
            }
            ++unstable;
        }
    }
    const bool odd_truncation = trunc.is_series && trunc.order % 2 == 1 && params.epsilon != 0.0;
    if (!enable_filter && (unstable > 0 || odd_truncation)) {
        std::ostringstream os;
        if (unstable > 0) {
            os << "truncated symbol has positive real part on |p| in [" << bad_lo << ", " << bad_hi
               << "]; enable the spectral filter";
        } else {
            // odd truncation: dispersive top term dominates the band edge
            const double pstar =
                std::pow(std::tgamma(trunc.order + 1.0) / 2.0, 1.0 / (trunc.order - 2.0)) /
                std::abs(params.epsilon);
            os << "odd truncation order " << trunc.order << " is ill-posed for |p| > " << pstar
               << "; enable the spectral filter";
        }
        throw StabilityError(os.str());
    }

    std::vector<std::complex<double>> mult(grid.n());
    int filtered = 0;
    for (int k = 0; k < grid.n(); ++k) {
        if (enable_filter && symbol[k].real() > 0.0) {
            mult[k] = 0.0;
            ++filtered;
        } else {
            mult[k] = std::exp(t * symbol[k]);
        }
    }

    KernelDensity out{grid, propagate(initial, grid, mult),
                      ModelParams(params.sigma, params.epsilon, t), KernelMethod::spectral,
                      trunc.is_series ? trunc.order : 0, filtered};
    // Truncated symbols are dispersive: ringing (including negative lobes and
    // boundary oscillation) is inherent to the method, so the mass invariant
    // is enforced on the rectangle sum (the p = 0 transform value).
    double rect = 0.0;
    for (double v : out.values) rect += v;
    rect *= grid.dx();
    if (std::abs(rect - 1.0) > 1e-4)
        throw ValidationError("spectral_propagate: kernel mass " + std::to_string(rect) +
                              " outside 1 +- 0.0001");
    return out;
}

} // namespace qsk
