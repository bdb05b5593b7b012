#include "qsk/fft.hpp"

#include <cmath>

#include "qsk/errors.hpp"

namespace qsk {

namespace {

void transform(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("fft length must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace

void fft(std::vector<std::complex<double>>& a) { transform(a, -1); }

void ifft(std::vector<std::complex<double>>& a) {
    transform(a, +1);
    const double inv = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= inv;
}

std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("convolution operands must have equal length");
    std::vector<std::complex<double>> fa(a.begin(), a.end());
    std::vector<std::complex<double>> fb(b.begin(), b.end());
    fft(fa);
    fft(fb);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    ifft(fa);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < fa.size(); ++i) out[i] = fa[i].real();
    return out;
}

} // namespace qsk
