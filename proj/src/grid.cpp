#include "qsk/grid.hpp"

#include <cmath>

namespace qsk {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
} // namespace

SpatialGrid::SpatialGrid(double dx, int n) : dx_(dx), n_(n) {
    if (!power_of_two(n_) || n_ < 64)
        throw GridError("grid size must be a power of two >= 64");
    if (!(dx_ > 0.0) || !std::isfinite(dx_))
        throw GridError("grid spacing must be positive and finite");
}

SpatialGrid SpatialGrid::centered(double half_width, int n) {
    if (!(half_width > 0.0)) throw GridError("grid half width must be positive");
    return SpatialGrid(2.0 * half_width / n, n);
}

SpatialGrid SpatialGrid::with_spacing(double dx, int n) { return SpatialGrid(dx, n); }

std::vector<double> SpatialGrid::nodes() const {
    std::vector<double> xs(n_);
    for (int j = 0; j < n_; ++j) xs[j] = node(j);
    return xs;
}

double SpatialGrid::wavenumber(int k) const {
    const int kk = (k < n_ / 2) ? k : k - n_;
    return kk * 2.0 * M_PI / (n_ * dx_);
}

} // namespace qsk
