#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emgcs/features.hpp"
#include "emgcs/layers.hpp"
#include "emgcs/tensor.hpp"

namespace emgcs {

struct LayerSpec {
    enum class Kind { Conv, Pool };
    Kind kind = Kind::Conv;
    int filters = 0;  // conv only
};

// Canonical conv/pool placement. Five convolutions interleave with the three
// poolings as conv,conv,pool,conv,pool,conv,conv,pool - the placement that
// takes a 6x7 grid to 1x1 with ceiling pooling. Two convolutions (the reduced
// test model) use conv,pool,conv,pool,pool.
std::vector<LayerSpec> default_channel_layout(const std::vector<int>& kernel_counts);

struct ModelConfig {
    std::array<bool, 6> channel_mask = {true, true, true, true, true, true};
    std::vector<int> kernel_counts = {256, 128, 64, 32, 16};
    int filter_size = 5;
    std::vector<int> dense_widths = {96, 32, 2};
    std::array<int, 6> input_depths = kFamilyDepth;
    int grid_h = kMuscles, grid_w = kMovements;
    double bn_momentum = 0.9;
    double bn_eps = 1e-5;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ConvBlock {
    Tensor weights;  // (cout, f, f, cin)
    std::vector<double> bias;
    BatchNormState bn;
    // gradients, parallel layout
    Tensor d_weights;
    std::vector<double> d_bias, d_bn_scale, d_bn_shift;
};

struct ChannelStack {
    int family = 0;
    std::vector<LayerSpec> layout;
    std::vector<ConvBlock> convs;  // in layout order
    int flat_width = 0;            // channels after the final pool (spatial 1x1)
};

struct DenseLayer {
    Tensor weights;  // (in, 1, 1, out)
    std::vector<double> bias;
    bool relu = true;
    Tensor d_weights;
    std::vector<double> d_bias;
};

struct ParamRef {
    std::string name;
    double* value;
    double* grad;
    std::size_t size;
    bool weight;  // participates in the L2 term
};

struct Model {
    ModelConfig config;
    std::vector<ChannelStack> channels;  // active families only, ascending
    std::vector<DenseLayer> dense;

    int concat_width() const;
    // (h, w) after each pooling layer, from the first channel's layout
    std::vector<std::pair<int, int>> spatial_path() const;
    std::vector<ParamRef> parameters();
    std::vector<std::pair<std::string, std::vector<double>*>> bn_running_state();
    void zero_grads();
};

Model make_model(const ModelConfig& config);

// Per-channel traces retained for the backward pass.
struct ChannelTrace {
    std::vector<Tensor> layer_inputs;             // input to each layout entry
    std::vector<BatchNormCache> bn_caches;        // per conv block
    std::vector<Tensor> pre_bn;                   // conv output before BN
    std::vector<Tensor> post_relu;                // activation after ReLU
    std::vector<std::vector<std::size_t>> pool_argmax;
};

struct ModelTrace {
    bool train_mode = false;
    std::vector<ChannelTrace> channels;
    Tensor concat;
    std::vector<Tensor> dense_inputs;
    Tensor logits;
    Tensor probabilities;
};

// inputs[k] is the batched grid tensor of family k (ignored when masked).
// Train mode uses batch statistics and updates BN running estimates.
ModelTrace model_forward(Model& model, const std::array<Tensor, 6>& inputs, bool train);

struct LossTerms {
    double ce = 0.0;   // softmax cross-entropy, summed over batch and classes
    double se = 0.0;   // squared error, summed over batch and classes
    double reg = 0.0;  // alpha * sum of squared weights
    double total = 0.0;
};

LossTerms compute_loss(const Tensor& probabilities,
                       const std::vector<std::array<double, 2>>& labels, Model& model,
                       double alpha);

// Accumulates gradients of the total loss into the model's grad buffers.
void model_backward(Model& model, const ModelTrace& trace,
                    const std::vector<std::array<double, 2>>& labels, double alpha);

}  // namespace emgcs
