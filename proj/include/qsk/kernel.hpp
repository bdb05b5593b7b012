#pragma once

#include <vector>

#include "qsk/grid.hpp"
#include "qsk/model.hpp"

namespace qsk {

enum class KernelMethod { fourier, spectral, composed };

/// Transition density sampled on a grid.  Values are probability mass per
/// x-unit; node j carries mass values[j]*dx.  For eps != 0 on a
/// lattice-commensurate grid (see auto_grid) the representation is exact:
/// the law lives on the jump lattice and each lattice node holds its exact
/// probability mass.
struct KernelDensity {
    SpatialGrid grid;
    std::vector<double> values;
    ModelParams params;
    KernelMethod method = KernelMethod::fourier;
    int truncation_order = 0; // 0 for the closed-form symbol
    int filtered_modes = 0;   // modes removed by the spectral stability filter

    KernelDensity(SpatialGrid g, std::vector<double> v, ModelParams p, KernelMethod m,
                  int trunc_order, int filtered)
        : grid(g), values(std::move(v)), params(p), method(m), truncation_order(trunc_order),
          filtered_modes(filtered) {}

    /// Trapezoid integral over the grid.
    double mass() const;

    /// Right-continuous CDF built from node masses (mass of node j counts
    /// from x >= x_j), normalized by the total mass.
    double cdf(double x) const;

    /// Prefix masses C_j = sum_{l<=j} values[l]*dx (unnormalized).
    const std::vector<double>& prefix_mass() const;

private:
    mutable std::vector<double> prefix_;
};

/// Deterministic grid rule.  For eps = 0: +-12 sigma sqrt(t), n = 8192.
/// For eps != 0 the spacing is chosen commensurate with the jump lattice,
/// dx = |eps|/L, with L picked so that (when the expected jump count allows
/// it) every atom of the law and its drift offset land exactly on grid
/// nodes; the transform then reproduces the lattice masses to machine
/// precision.  Width >= 12 sigma sqrt(t) + 6 sigma^2 t / |eps|.
SpatialGrid auto_grid(const ModelParams& params);

/// Transition kernel at params.horizon via Fourier inversion of
/// exp(t * m(p)) with the closed-form characteristic exponent.
KernelDensity compute_kernel(const ModelParams& params, const SpatialGrid& grid);
KernelDensity compute_kernel(const ModelParams& params);

struct CumulantSet {
    double k2, k3, k4;
    double skewness() const;        // k3 / k2^(3/2)
    double excess_kurtosis() const; // k4 / k2^2
};

/// kappa_2 = sigma^2 t, kappa_3 = -eps sigma^2 t, kappa_4 = eps^2 sigma^2 t.
CumulantSet analytic_cumulants(const ModelParams& params);

/// Trapezoid-rule moments of orders 1..max_order (max_order <= 6): entry 0
/// is the mean (first moment about zero, ~0 for these centered laws), entry
/// k-1 for k >= 2 the k-th central moment.
std::vector<double> empirical_moments(const KernelDensity& kernel, int max_order);

/// Chapman-Kolmogorov composition by grid convolution; horizons add.
KernelDensity compose(const KernelDensity& a, const KernelDensity& b);

/// Evolve an initial density with the K-truncated (or closed-form) symbol,
/// diagonally in transform space.  Odd truncation orders and truncations
/// whose symbol has positive real part on the grid band are ill-posed and
/// require the stabilizing filter (hard cutoff of the offending modes);
/// without it a StabilityError names the offending wavenumber band.
KernelDensity spectral_propagate(const std::vector<double>& initial, const SpatialGrid& grid,
                                 const ModelParams& params, const TruncationSpec& trunc, double t,
                                 bool enable_filter = false);

/// Discrete delta (mass 1 at x = 0) on a grid, the natural initial density.
std::vector<double> delta_density(const SpatialGrid& grid);

} // namespace qsk
