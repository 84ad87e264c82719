#pragma once

#include <filesystem>

#include "emgcs/model.hpp"
#include "emgcs/spatial.hpp"
#include "emgcs/train.hpp"

namespace emgcs {

// JSON <-> config helpers shared by checkpoints, stores and the CLI.
std::string model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const std::string& text);
std::string train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const std::string& text);
std::string feature_config_to_json(const FeatureConfig& c);
FeatureConfig feature_config_from_json(const std::string& text);

struct Checkpoint {
    Model model;
    ScalerStats scaler;
    TrainConfig train_config;
};

// Weights and BN running statistics as one little-endian f64 blob behind a
// JSON header; the scaler and feature options ride along so inference can
// refuse mismatched preprocessing.
void save_model(Model& model, const ScalerStats& scaler, const TrainConfig& train_config,
                const std::filesystem::path& path);

Checkpoint load_model(const std::filesystem::path& path);

}  // namespace emgcs
