#pragma once

#include <array>
#include <string>
#include <vector>

#include "emgcs/features.hpp"
#include "emgcs/tensor.hpp"

namespace emgcs {

// Output row r holds source muscle kRowPermutation[r]: anatomically adjacent
// muscles end up in adjacent rows (sternocleidomastoids, erector spinae pair,
// trapezius pair).
inline constexpr std::array<int, 6> kRowPermutation = {0, 5, 2, 3, 1, 4};

// One feature family arranged as a (1, 6, 7, d) tensor in permuted row order.
struct FeatureGrid {
    int family = 0;
    Tensor values;
};

// Raw grids; cells missing from the mask carry NaN so unscaled use is visible.
std::array<FeatureGrid, 6> build_grids(const FeatureSample& fs);

// Inverts build_grids (used by tests).
FeatureSample ungrid(const std::array<FeatureGrid, 6>& grids);

struct ScalerStats {
    std::vector<double> mean;        // per feature, training data only
    std::vector<double> stddev;      // population
    std::vector<double> imputation;  // training mean; 0 when never observed
    std::vector<bool> passthrough;   // zero variance or never observed
    FeatureConfig feature_config;

    std::string to_json() const;
    static ScalerStats from_json(const std::string& text);
};

ScalerStats fit_scaler(const std::vector<FeatureSample>& train, const FeatureConfig& cfg);

// Impute masked cells with the training mean, then standardize. Output grids
// contain no NaN.
std::array<FeatureGrid, 6> apply_scaler(const FeatureSample& fs, const ScalerStats& stats);

// (1,0) healthy, (0,1) patient.
std::array<double, 2> one_hot(int label);

}  // namespace emgcs
