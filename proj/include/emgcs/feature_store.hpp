#pragma once

#include <filesystem>
#include <vector>

#include "emgcs/features.hpp"

namespace emgcs {

// Extracted features for one dataset part: 2646 values + presence mask +
// label + subject id per sample, with the extraction options for
// compatibility checks.
struct FeatureStore {
    FeatureConfig config;
    std::vector<FeatureSample> samples;
};

void save_feature_store(const FeatureStore& store, const std::filesystem::path& path);
FeatureStore load_feature_store(const std::filesystem::path& path);

// Plain-text mirror: subject_id, label, the 2646 named feature columns, then
// one mask column per feature (1 = present).
void export_feature_csv(const FeatureStore& store, const std::filesystem::path& path);

}  // namespace emgcs
