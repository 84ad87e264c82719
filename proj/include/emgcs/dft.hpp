#pragma once

#include <complex>
#include <span>
#include <vector>

namespace emgcs {

// Unnormalized forward DFT of one signal: X_m = sum_t p_t * exp(-2*pi*i*m*t/n).
struct Spectrum {
    std::vector<std::complex<double>> coefficients;  // X_0 .. X_{n-1}
    std::vector<double> one_sided;                   // |X_0| .. |X_{floor(n/2)}|
    int signal_length = 0;
};

Spectrum dft_spectrum(std::span<const double> signal);

// In-place complex FFT, any length (radix-2 for powers of two, Bluestein
// otherwise). inverse=true applies the conjugate transform WITHOUT the 1/n
// scale; callers divide when they need the inverse proper.
void fft(std::vector<std::complex<double>>& x, bool inverse);

}  // namespace emgcs
