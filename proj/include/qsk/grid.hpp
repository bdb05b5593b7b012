#pragma once

#include <vector>

#include "qsk/errors.hpp"

namespace qsk {

/// Uniform spatial grid for kernel work.  Nodes x_j = x_min + j*dx for
/// j = 0..n-1 with x = 0 sitting exactly on node n/2; n is a power of two
/// (>= 64).  The grid is treated as one period of length n*dx by the
/// transform machinery, so x_max = x_min + n*dx is the period end, one
/// spacing past the last node.
class SpatialGrid {
public:
    /// Symmetric grid from a half width: dx = 2*half_width/n.
    static SpatialGrid centered(double half_width, int n);

    /// Symmetric grid from a node spacing.
    static SpatialGrid with_spacing(double dx, int n);

    double x_min() const { return -0.5 * static_cast<double>(n_) * dx_; }
    double x_max() const { return 0.5 * static_cast<double>(n_) * dx_; }
    double dx() const { return dx_; }
    int n() const { return n_; }
    int zero_node() const { return n_ / 2; }
    double node(int j) const { return (j - n_ / 2) * dx_; }
    std::vector<double> nodes() const;

    /// Wavenumber of transform bin k (k = 0..n-1, wrapped to negative
    /// frequencies above n/2): p_k = k' * 2*pi/(n*dx).
    double wavenumber(int k) const;

    bool operator==(const SpatialGrid& o) const { return n_ == o.n_ && dx_ == o.dx_; }

private:
    SpatialGrid(double dx, int n);
    double dx_;
    int n_;
};

} // namespace qsk
