#pragma once

#include <span>
#include <vector>

namespace emgcs {

// Autoregressive fit y(t) = sum_i phi_i * y(t-i) + eps.
struct ARFit {
    int order = 0;
    std::vector<double> coefficients;  // phi_1 .. phi_p
    double noise_variance = 0.0;
};

// Biased autocorrelation r[k] = (1/n) * sum_t x[t]*x[t+k], k = 0..max_lag,
// after mean removal.
std::vector<double> autocorrelation(std::span<const double> signal, int max_lag);

// Levinson-Durbin recursion on the biased autocorrelation. Throws
// DegenerateSignalError when the (mean-removed) signal has zero variance.
ARFit fit_ar(std::span<const double> signal, int order);

// Same recursion driven directly by an autocorrelation sequence; used by
// fit_ar and exposed for tests.
ARFit levinson_durbin(const std::vector<double>& autocorr, int order);

}  // namespace emgcs
