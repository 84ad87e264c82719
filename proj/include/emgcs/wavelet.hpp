#pragma once

#include <span>
#include <string>
#include <vector>

namespace emgcs {

struct WaveletFilters {
    std::string name;
    std::vector<double> dec_lo, dec_hi;  // analysis
    std::vector<double> rec_lo, rec_hi;  // synthesis
    int length() const { return static_cast<int>(rec_lo.size()); }
};

// Supported: "haar"/"db1", "db2", "db4".
WaveletFilters wavelet_filters(const std::string& name);

enum class Padding {
    Symmetric,  // half-sample reflection (edge sample repeated)
    Periodic,   // circular; energy-preserving for even lengths
};

Padding padding_from_name(const std::string& name);
std::string padding_name(Padding p);

// One analysis step. Output length is floor((n+F-1)/2) for Symmetric and
// ceil(n/2) for Periodic.
void dwt_step(std::span<const double> x, const WaveletFilters& f, Padding mode,
              std::vector<double>& approx, std::vector<double>& detail);

// Inverse of dwt_step; out_len selects the stored original length.
std::vector<double> idwt_step(const std::vector<double>& approx,
                              const std::vector<double>& detail,
                              const WaveletFilters& f, Padding mode, int out_len);

// Multilevel decomposition. details[0] is level 1 (finest); approximation is
// the level `levels` coarse signal.
struct WaveletTree {
    std::vector<double> approximation;
    std::vector<std::vector<double>> details;
    std::vector<int> lengths;  // lengths[i] = input length at level i+1
    std::string wavelet_name;
    std::string padding_mode;
};

WaveletTree wavedec(std::span<const double> signal, const std::string& wavelet,
                    int levels, Padding mode);
std::vector<double> waverec(const WaveletTree& tree);

// Full wavelet-packet tree to `levels`, terminal subbands in frequency
// (sequency) order. Periodic padding throughout.
std::vector<std::vector<double>> wpd_subbands(std::span<const double> signal,
                                              const std::string& wavelet, int levels);

// Smallest signal length accepted for an L-level decomposition.
int min_length_for_levels(const WaveletFilters& f, int levels);

}  // namespace emgcs
