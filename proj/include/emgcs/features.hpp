#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "emgcs/dft.hpp"
#include "emgcs/recording.hpp"

namespace emgcs {

struct FeatureConfig {
    bool rms_sqrt = false;          // rms is a mean of squares unless enabled
    std::string wavelet = "db4";
    std::string dwt_padding = "symmetric";
    int entropy_bins = 128;
    int mode_bins = 64;
    double sample_rate = 1000.0;    // Hz, for mf/mpf frequency axes
    double log_floor = -12.0;       // log10 floor for empty/zero coefficient sets

    bool operator==(const FeatureConfig&) const = default;
};

// Family depths: time 11, frequency 14, DWT 15, WPD 8, AR 14, entropy 1.
inline constexpr std::array<int, 6> kFamilyDepth = {11, 14, 15, 8, 14, 1};
inline constexpr int kFeaturesPerCell = 63;
inline constexpr int kTotalFeatures = kCells * kFeaturesPerCell;  // 2646

// [mean, var, std, mode, max, min, over_zero, range, aemg, iemg, rms]
std::array<double, 11> time_features(std::span<const double> signal,
                                     const FeatureConfig& cfg = {});

// [dc, mean, var, std, skew, kurt, entropy, s_mean, s_std, s_var, s_skew,
//  s_kurt, mf, mpf]; degenerate set true when the magnitudes cannot support
// the shape features (reported as 0).
std::array<double, 14> freq_features(const Spectrum& spectrum, double sample_rate,
                                     bool* degenerate = nullptr);

// (c_max, singular_value, c_energy) per coefficient set
struct CoeffStats {
    double c_max;
    double singular_value;
    double c_energy;
};
CoeffStats coeff_stats(std::span<const double> coeffs, double log_floor);

// 5-level DWT; stats of approximation then details at levels 5,4,3,2.
std::array<double, 15> dwt_features(std::span<const double> signal,
                                    const FeatureConfig& cfg = {});

// Level-3 wavelet packets; log-energy of the 8 terminal subbands.
std::array<double, 8> wpd_features(std::span<const double> signal,
                                   const FeatureConfig& cfg = {});

// AR(10) then AR(4) coefficients, 14 values.
std::array<double, 14> ar_features(std::span<const double> signal);

double entropy_feature(std::span<const double> signal, int bins = 128);

// One sample's features: six families over the 6x7 grid, with a per-family
// per-cell presence mask. values[k] is muscle-major: (muscle*7+movement)*d+f.
struct FeatureSample {
    std::array<std::vector<double>, 6> values;
    std::array<std::array<bool, kCells>, 6> present;
    int label = 0;
    std::string subject_id;

    FeatureSample();
};

// Applies all six extractors to each grid cell; a failing cell is masked, a
// sample with more than half its cells fully missing is rejected.
FeatureSample extract_sample(const SampleGrid& grid, const FeatureConfig& cfg);

// Batch extraction, parallel over grids. Grids rejected as unusable are
// dropped; *rejected (when given) receives their count.
std::vector<FeatureSample> extract_samples(const std::vector<SampleGrid>& grids,
                                           const FeatureConfig& cfg,
                                           int* rejected = nullptr);

// Canonical flat layout of one sample's 2646 features: family-major, then
// muscle-major cells, then per-family feature index.
int feature_flat_index(int family, int muscle, int movement, int feature);
const std::array<std::string, 6>& family_names();
const std::vector<std::string>& feature_names(int family);
std::vector<std::string> all_column_names();

// Flattened copy (masked entries NaN) plus per-column presence.
void flatten_sample(const FeatureSample& fs, std::vector<double>& values,
                    std::vector<bool>& present);

}  // namespace emgcs
