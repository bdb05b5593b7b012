#pragma once

#include <complex>
#include <vector>

namespace qsk {

/// In-place radix-2 complex FFT, sum_j a_j e^{-2 pi i jk/n} (forward sign).
/// n must be a power of two.
void fft(std::vector<std::complex<double>>& a);

/// Inverse transform (e^{+2 pi i jk/n} with the 1/n factor applied).
void ifft(std::vector<std::complex<double>>& a);

/// Circular convolution of two real sequences of equal power-of-two length:
/// c_m = sum_j a_j b_{(m-j) mod n}.
std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b);

} // namespace qsk
