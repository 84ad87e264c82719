#include "emgcs/spatial.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "emgcs/errors.hpp"

namespace emgcs {

using nlohmann::json;

namespace {

std::array<FeatureGrid, 6> grids_from_flat(const std::vector<double>& flat) {
    std::array<FeatureGrid, 6> grids;
    for (int k = 0; k < 6; ++k) {
        const int d = kFamilyDepth[k];
        grids[k].family = k;
        grids[k].values = Tensor(1, kMuscles, kMovements, d);
        for (int r = 0; r < kMuscles; ++r) {
            const int src = kRowPermutation[r];
            for (int j = 0; j < kMovements; ++j)
                for (int f = 0; f < d; ++f)
                    grids[k].values.at(0, r, j, f) =
                        flat[feature_flat_index(k, src, j, f)];
        }
    }
    return grids;
}

}  // namespace

std::array<FeatureGrid, 6> build_grids(const FeatureSample& fs) {
    std::vector<double> flat;
    std::vector<bool> present;
    flatten_sample(fs, flat, present);
    return grids_from_flat(flat);
}

FeatureSample ungrid(const std::array<FeatureGrid, 6>& grids) {
    FeatureSample fs;
    for (int k = 0; k < 6; ++k) {
        const int d = kFamilyDepth[k];
        for (int r = 0; r < kMuscles; ++r) {
            const int src = kRowPermutation[r];
            for (int j = 0; j < kMovements; ++j) {
                bool any_nan = false;
                for (int f = 0; f < d; ++f) {
                    const double v = grids[k].values.at(0, r, j, f);
                    fs.values[k][(src * kMovements + j) * d + f] = v;
                    if (std::isnan(v)) any_nan = true;
                }
                fs.present[k][src * kMovements + j] = !any_nan;
            }
        }
    }
    return fs;
}

ScalerStats fit_scaler(const std::vector<FeatureSample>& train, const FeatureConfig& cfg) {
    if (train.size() < 2)
        throw ConfigError("fit_scaler: need at least 2 training samples, got " +
                          std::to_string(train.size()));

    ScalerStats stats;
    stats.feature_config = cfg;
    stats.mean.assign(kTotalFeatures, 0.0);
    stats.stddev.assign(kTotalFeatures, 0.0);
    stats.imputation.assign(kTotalFeatures, 0.0);
    stats.passthrough.assign(kTotalFeatures, false);

    std::vector<double> sum(kTotalFeatures, 0.0), sumsq(kTotalFeatures, 0.0);
    std::vector<long> count(kTotalFeatures, 0);

    std::vector<double> flat;
    std::vector<bool> present;
    for (const auto& fs : train) {
        flatten_sample(fs, flat, present);
        for (int i = 0; i < kTotalFeatures; ++i) {
            if (!present[i]) continue;
            sum[i] += flat[i];
            sumsq[i] += flat[i] * flat[i];
            ++count[i];
        }
    }

    for (int i = 0; i < kTotalFeatures; ++i) {
        if (count[i] == 0) {
            stats.passthrough[i] = true;  // never observed in training
            continue;
        }
        const double m = sum[i] / count[i];
        double var = sumsq[i] / count[i] - m * m;
        if (var < 0.0) var = 0.0;  // rounding guard
        stats.mean[i] = m;
        stats.imputation[i] = m;
        stats.stddev[i] = std::sqrt(var);
        if (stats.stddev[i] == 0.0) stats.passthrough[i] = true;
    }
    return stats;
}

std::array<FeatureGrid, 6> apply_scaler(const FeatureSample& fs, const ScalerStats& stats) {
    if (static_cast<int>(stats.mean.size()) != kTotalFeatures)
        throw ConfigError("apply_scaler: scaler not fitted");

    std::vector<double> flat;
    std::vector<bool> present;
    flatten_sample(fs, flat, present);
    for (int i = 0; i < kTotalFeatures; ++i) {
        double v = present[i] ? flat[i] : stats.imputation[i];
        if (!stats.passthrough[i]) v = (v - stats.mean[i]) / stats.stddev[i];
        flat[i] = v;
    }
    return grids_from_flat(flat);
}

std::array<double, 2> one_hot(int label) {
    if (label != 0 && label != 1)
        throw LabelError("label must be 0 or 1, got " + std::to_string(label));
    return label == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
}

std::string ScalerStats::to_json() const {
    json j;
    j["mean"] = mean;
    j["stddev"] = stddev;
    j["imputation"] = imputation;
    j["passthrough"] = std::vector<int>(passthrough.begin(), passthrough.end());
    j["feature_config"] = {{"rms_sqrt", feature_config.rms_sqrt},
                           {"wavelet", feature_config.wavelet},
                           {"dwt_padding", feature_config.dwt_padding},
                           {"entropy_bins", feature_config.entropy_bins},
                           {"mode_bins", feature_config.mode_bins},
                           {"sample_rate", feature_config.sample_rate},
                           {"log_floor", feature_config.log_floor}};
    return j.dump();
}

ScalerStats ScalerStats::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scaler stats: ") + e.what());
    }
    ScalerStats s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.stddev = j.at("stddev").get<std::vector<double>>();
    s.imputation = j.at("imputation").get<std::vector<double>>();
    const auto pt = j.at("passthrough").get<std::vector<int>>();
    s.passthrough.assign(pt.begin(), pt.end());
    const auto& fc = j.at("feature_config");
    s.feature_config.rms_sqrt = fc.at("rms_sqrt").get<bool>();
    s.feature_config.wavelet = fc.at("wavelet").get<std::string>();
    s.feature_config.dwt_padding = fc.at("dwt_padding").get<std::string>();
    s.feature_config.entropy_bins = fc.at("entropy_bins").get<int>();
    s.feature_config.mode_bins = fc.at("mode_bins").get<int>();
    s.feature_config.sample_rate = fc.at("sample_rate").get<double>();
    s.feature_config.log_floor = fc.at("log_floor").get<double>();
    return s;
}

}  // namespace emgcs
