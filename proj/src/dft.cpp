#include "emgcs/dft.hpp"

#include <cmath>
#include <numbers>

#include "emgcs/errors.hpp"

namespace emgcs {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = x[i + k];
                const std::complex<double> v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Chirp-z (Bluestein) for arbitrary n, expressed through a power-of-two FFT.
void fft_bluestein(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        // j^2 mod 2n keeps the angle argument small for long signals
        const std::size_t q = (j * j) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(q) / static_cast<double>(n);
        chirp[j] = {std::cos(ang), std::sin(ang)};
    }

    std::vector<std::complex<double>> a(m, {0.0, 0.0}), b(m, {0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) {
        b[j] = std::conj(chirp[j]);
        b[m - j] = b[j];
    }

    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    fft_pow2(a, true);

    const double scale = 1.0 / static_cast<double>(m);
    for (std::size_t j = 0; j < n; ++j) x[j] = a[j] * scale * chirp[j];
}

}  // namespace

void fft(std::vector<std::complex<double>>& x, bool inverse) {
    if (x.size() < 2) return;
    if (is_pow2(x.size()))
        fft_pow2(x, inverse);
    else
        fft_bluestein(x, inverse);
}

Spectrum dft_spectrum(std::span<const double> signal) {
    const std::size_t n = signal.size();
    if (n < 2) throw TooShortError("dft_spectrum: need at least 2 samples, got " +
                                   std::to_string(n));
    for (double v : signal)
        if (!std::isfinite(v)) throw InvalidSignalError("dft_spectrum: non-finite sample");

    Spectrum s;
    s.signal_length = static_cast<int>(n);
    s.coefficients.resize(n);
    for (std::size_t t = 0; t < n; ++t) s.coefficients[t] = {signal[t], 0.0};
    fft(s.coefficients, false);

    s.one_sided.resize(n / 2 + 1);
    for (std::size_t m = 0; m <= n / 2; ++m) s.one_sided[m] = std::abs(s.coefficients[m]);
    return s;
}

}  // namespace emgcs
