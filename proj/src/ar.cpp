#include "emgcs/ar.hpp"

#include <cmath>
#include <string>

#include "emgcs/errors.hpp"

namespace emgcs {

std::vector<double> autocorrelation(std::span<const double> signal, int max_lag) {
    const int n = static_cast<int>(signal.size());
    if (n <= max_lag)
        throw TooShortError("autocorrelation: need more than " + std::to_string(max_lag) +
                            " samples, got " + std::to_string(n));
    double mean = 0.0;
    for (double v : signal) {
        if (!std::isfinite(v)) throw InvalidSignalError("autocorrelation: non-finite sample");
        mean += v;
    }
    mean /= n;

    std::vector<double> r(max_lag + 1, 0.0);
    for (int k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (int t = 0; t + k < n; ++t)
            s += (signal[t] - mean) * (signal[t + k] - mean);
        r[k] = s / n;
    }
    return r;
}

ARFit levinson_durbin(const std::vector<double>& autocorr, int order) {
    if (static_cast<int>(autocorr.size()) < order + 1)
        throw ShapeError("levinson_durbin: need " + std::to_string(order + 1) +
                         " autocorrelation lags");
    const double r0 = autocorr[0];
    if (!(r0 > 0.0))
        throw DegenerateSignalError("levinson_durbin: zero-variance signal");

    std::vector<double> a(order + 1, 0.0);  // a[1..m] at stage m
    std::vector<double> prev(order + 1, 0.0);
    double err = r0;

    for (int m = 1; m <= order; ++m) {
        double acc = autocorr[m];
        for (int i = 1; i < m; ++i) acc -= a[i] * autocorr[m - i];
        if (!(err > 0.0))
            throw DegenerateSignalError("levinson_durbin: singular autocorrelation at order " +
                                        std::to_string(m));
        const double k = acc / err;
        prev = a;
        a[m] = k;
        for (int i = 1; i < m; ++i) a[i] = prev[i] - k * prev[m - i];
        err *= (1.0 - k * k);
    }

    ARFit fit;
    fit.order = order;
    fit.coefficients.assign(a.begin() + 1, a.end());
    fit.noise_variance = err > 0.0 ? err : 0.0;
    return fit;
}

ARFit fit_ar(std::span<const double> signal, int order) {
    const std::vector<double> r = autocorrelation(signal, order);
    // a constant signal leaves only rounding residue after mean removal
    double raw_power = 0.0;
    for (double v : signal) raw_power += v * v;
    raw_power /= static_cast<double>(signal.size());
    if (r[0] <= raw_power * 1e-24)
        throw DegenerateSignalError("fit_ar: zero-variance signal");
    return levinson_durbin(r, order);
}

}  // namespace emgcs
