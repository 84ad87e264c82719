#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emgcs/model.hpp"
#include "emgcs/spatial.hpp"

namespace emgcs {

struct TrainConfig {
    int batch_size = 148;
    double learning_rate = 0.00006;
    int max_epoch = 10000;
    int early_stop_patience = 1500;  // evaluation rounds without improvement
    double alpha = 1e-4;             // L2 coefficient
    std::uint64_t seed = 0;
    std::array<bool, 6> channel_mask = {true, true, true, true, true, true};
    int filter_size = 5;
    std::vector<int> kernel_counts = {256, 128, 64, 32, 16};
    std::vector<int> dense_widths = {96, 32, 2};

    void validate() const;
    ModelConfig model_config() const;
};

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;
    std::vector<std::vector<double>> m, v;

    void init(const std::vector<ParamRef>& params);
};

// Standard bias-corrected Adam update from the accumulated gradients.
void adam_step(std::vector<ParamRef>& params, AdamState& state, double learning_rate);

// One scaled sample ready for the network.
struct LabeledGrids {
    std::array<Tensor, 6> grids;  // each (1, 6, 7, d_k)
    int label = 0;
    std::string subject_id;
};

std::vector<LabeledGrids> scale_samples(const std::vector<FeatureSample>& samples,
                                        const ScalerStats& stats);

struct EvalRound {
    int round = 0;  // 1-based epoch index
    LossTerms train_loss;
    double val_accuracy = 0.0;
    bool is_best = false;
    double elapsed_seconds = 0.0;  // log-only; excluded from exports
};

struct TrainHistory {
    std::vector<EvalRound> rounds;
    int best_round = 0;
    std::string stop_reason;  // "early-stop" or "max-epoch"
};

struct TrainResult {
    Model model;  // best-validation checkpoint
    TrainHistory history;
};

// Minibatch Adam training with per-epoch validation and best-model retention.
TrainResult train_model(const std::vector<LabeledGrids>& train,
                        const std::vector<LabeledGrids>& validation,
                        const TrainConfig& config, bool quiet = true);

struct Prediction {
    double p_healthy = 0.0;
    double p_patient = 0.0;
    int label = 0;
    bool tie = false;
};

// Infer-mode predictions; ties break toward the patient class and are
// flagged. Throws on non-finite (unscaled) inputs.
std::vector<Prediction> predict(Model& model, const std::vector<LabeledGrids>& samples,
                                int chunk = 96);

double accuracy_of(const std::vector<Prediction>& preds,
                   const std::vector<LabeledGrids>& samples);

void save_history_csv(const TrainHistory& history, const std::string& path);

}  // namespace emgcs
