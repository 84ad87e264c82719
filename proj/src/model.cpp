#include "emgcs/model.hpp"

#include <cmath>

#include "emgcs/errors.hpp"
#include "emgcs/rng.hpp"

namespace emgcs {

std::vector<LayerSpec> default_channel_layout(const std::vector<int>& kernel_counts) {
    using K = LayerSpec::Kind;
    std::vector<LayerSpec> layout;
    if (kernel_counts.size() == 5) {
        layout = {{K::Conv, kernel_counts[0]}, {K::Conv, kernel_counts[1]}, {K::Pool, 0},
                  {K::Conv, kernel_counts[2]}, {K::Pool, 0},
                  {K::Conv, kernel_counts[3]}, {K::Conv, kernel_counts[4]}, {K::Pool, 0}};
    } else if (kernel_counts.size() == 2) {
        layout = {{K::Conv, kernel_counts[0]}, {K::Pool, 0},
                  {K::Conv, kernel_counts[1]}, {K::Pool, 0}, {K::Pool, 0}};
    } else {
        throw ConfigError("default_channel_layout: supported conv counts are 5 and 2, got " +
                          std::to_string(kernel_counts.size()));
    }
    return layout;
}

void ModelConfig::validate() const {
    bool any = false;
    for (bool m : channel_mask) any = any || m;
    if (!any) throw ConfigError("channel mask disables every channel");
    if (kernel_counts.empty()) throw ConfigError("kernel_counts empty");
    for (int k : kernel_counts)
        if (k <= 0) throw ConfigError("kernel counts must be positive");
    if (filter_size < 1 || filter_size > 7)
        throw ConfigError("filter_size must be in [1,7], got " + std::to_string(filter_size));
    if (dense_widths.empty() || dense_widths.back() != 2)
        throw ConfigError("dense stack must end with width 2");
    for (int w : dense_widths)
        if (w <= 0) throw ConfigError("dense widths must be positive");
}

namespace {

double he_uniform_draw(Rng& rng, int fan_in) {
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-limit, limit);
    return u(rng);
}

}  // namespace

Model make_model(const ModelConfig& config) {
    config.validate();
    Model model;
    model.config = config;
    Rng rng(mix_seed(config.seed, 0x10de1ULL));

    const std::vector<LayerSpec> layout = default_channel_layout(config.kernel_counts);

    for (int fam = 0; fam < 6; ++fam) {
        if (!config.channel_mask[fam]) continue;
        ChannelStack ch;
        ch.family = fam;
        ch.layout = layout;

        int h = config.grid_h, w = config.grid_w, depth = config.input_depths[fam];
        int pools = 0;
        for (const auto& spec : layout) {
            if (spec.kind == LayerSpec::Kind::Conv) {
                ConvBlock blk;
                const int f = config.filter_size;
                const int fan_in = f * f * depth;
                blk.weights = Tensor(spec.filters, f, f, depth);
                for (auto& v : blk.weights.data) v = he_uniform_draw(rng, fan_in);
                blk.bias.assign(spec.filters, 0.0);
                blk.bn = BatchNormState(spec.filters);
                blk.d_weights = Tensor(spec.filters, f, f, depth);
                blk.d_bias.assign(spec.filters, 0.0);
                blk.d_bn_scale.assign(spec.filters, 0.0);
                blk.d_bn_shift.assign(spec.filters, 0.0);
                ch.convs.push_back(std::move(blk));
                depth = spec.filters;
            } else {
                h = (h + 1) / 2;
                w = (w + 1) / 2;
                ++pools;
            }
        }
        if (h != 1 || w != 1)
            throw ShapeError("channel layout does not reduce " +
                             std::to_string(config.grid_h) + "x" +
                             std::to_string(config.grid_w) + " to 1x1 (got " +
                             std::to_string(h) + "x" + std::to_string(w) + ")");
        if (pools != 3)
            throw ShapeError("channel layout must contain exactly 3 pooling layers");
        ch.flat_width = depth;
        model.channels.push_back(std::move(ch));
    }

    int in_w = model.concat_width();
    for (std::size_t i = 0; i < config.dense_widths.size(); ++i) {
        DenseLayer layer;
        const int out_w = config.dense_widths[i];
        layer.weights = Tensor(in_w, 1, 1, out_w);
        for (auto& v : layer.weights.data) v = he_uniform_draw(rng, in_w);
        layer.bias.assign(out_w, 0.0);
        layer.relu = i + 1 < config.dense_widths.size();  // last layer feeds softmax
        layer.d_weights = Tensor(in_w, 1, 1, out_w);
        layer.d_bias.assign(out_w, 0.0);
        model.dense.push_back(std::move(layer));
        in_w = out_w;
    }
    return model;
}

int Model::concat_width() const {
    int w = 0;
    for (const auto& ch : channels) w += ch.flat_width;
    return w;
}

std::vector<std::pair<int, int>> Model::spatial_path() const {
    std::vector<std::pair<int, int>> path;
    int h = config.grid_h, w = config.grid_w;
    path.push_back({h, w});
    if (channels.empty()) return path;
    for (const auto& spec : channels.front().layout) {
        if (spec.kind == LayerSpec::Kind::Pool) {
            h = (h + 1) / 2;
            w = (w + 1) / 2;
            path.push_back({h, w});
        }
    }
    return path;
}

std::vector<ParamRef> Model::parameters() {
    std::vector<ParamRef> refs;
    for (auto& ch : channels) {
        const std::string base = "channel" + std::to_string(ch.family);
        int ci = 0;
        for (auto& blk : ch.convs) {
            const std::string p = base + ".conv" + std::to_string(ci++);
            refs.push_back({p + ".weights", blk.weights.data.data(),
                            blk.d_weights.data.data(), blk.weights.size(), true});
            refs.push_back({p + ".bias", blk.bias.data(), blk.d_bias.data(),
                            blk.bias.size(), false});
            refs.push_back({p + ".bn_scale", blk.bn.scale.data(), blk.d_bn_scale.data(),
                            blk.bn.scale.size(), false});
            refs.push_back({p + ".bn_shift", blk.bn.shift.data(), blk.d_bn_shift.data(),
                            blk.bn.shift.size(), false});
        }
    }
    int di = 0;
    for (auto& layer : dense) {
        const std::string p = "dense" + std::to_string(di++);
        refs.push_back({p + ".weights", layer.weights.data.data(),
                        layer.d_weights.data.data(), layer.weights.size(), true});
        refs.push_back({p + ".bias", layer.bias.data(), layer.d_bias.data(),
                        layer.bias.size(), false});
    }
    return refs;
}

std::vector<std::pair<std::string, std::vector<double>*>> Model::bn_running_state() {
    std::vector<std::pair<std::string, std::vector<double>*>> refs;
    for (auto& ch : channels) {
        int ci = 0;
        for (auto& blk : ch.convs) {
            const std::string p =
                "channel" + std::to_string(ch.family) + ".conv" + std::to_string(ci++);
            refs.push_back({p + ".bn_running_mean", &blk.bn.running_mean});
            refs.push_back({p + ".bn_running_var", &blk.bn.running_var});
        }
    }
    return refs;
}

void Model::zero_grads() {
    for (auto& ch : channels)
        for (auto& blk : ch.convs) {
            blk.d_weights.fill(0.0);
            std::fill(blk.d_bias.begin(), blk.d_bias.end(), 0.0);
            std::fill(blk.d_bn_scale.begin(), blk.d_bn_scale.end(), 0.0);
            std::fill(blk.d_bn_shift.begin(), blk.d_bn_shift.end(), 0.0);
        }
    for (auto& layer : dense) {
        layer.d_weights.fill(0.0);
        std::fill(layer.d_bias.begin(), layer.d_bias.end(), 0.0);
    }
}

ModelTrace model_forward(Model& model, const std::array<Tensor, 6>& inputs, bool train) {
    ModelTrace trace;
    trace.train_mode = train;

    int batch = -1;
    for (const auto& ch : model.channels) {
        const Tensor& in = inputs[ch.family];
        if (in.h != model.config.grid_h || in.w != model.config.grid_w ||
            in.c != model.config.input_depths[ch.family])
            throw ShapeError("channel " + std::to_string(ch.family) + ": input " +
                             in.shape_str() + " does not match grid (" +
                             std::to_string(model.config.grid_h) + "," +
                             std::to_string(model.config.grid_w) + "," +
                             std::to_string(model.config.input_depths[ch.family]) + ")");
        if (batch < 0) batch = in.n;
        if (in.n != batch) throw ShapeError("channels disagree on batch size");
    }
    if (batch <= 0) throw ShapeError("empty batch");

    trace.concat = Tensor(batch, 1, 1, model.concat_width());
    int concat_off = 0;

    // layer outputs stay finite; cheap tripwire kept out of release builds
#ifndef NDEBUG
    auto assert_finite = [](const Tensor& t, const char* where) {
        if (!t.all_finite())
            throw NumericError(std::string("non-finite values after ") + where);
    };
#else
    auto assert_finite = [](const Tensor&, const char*) {};
#endif

    for (auto& ch : model.channels) {
        ChannelTrace ct;
        Tensor x = inputs[ch.family];
        int conv_idx = 0;
        for (const auto& spec : ch.layout) {
            ct.layer_inputs.push_back(x);
            if (spec.kind == LayerSpec::Kind::Conv) {
                auto& blk = ch.convs[conv_idx];
                Tensor pre = conv2d_forward(x, blk.weights, blk.bias);
                BatchNormCache cache;
                Tensor normed = batchnorm_forward(pre, blk.bn, train, model.config.bn_momentum,
                                                  model.config.bn_eps,
                                                  train ? &cache : nullptr);
                Tensor act = relu_forward(normed);
                if (train) {
                    ct.pre_bn.push_back(std::move(pre));
                    ct.bn_caches.push_back(std::move(cache));
                    ct.post_relu.push_back(act);
                }
                x = std::move(act);
                assert_finite(x, "conv block");
                ++conv_idx;
            } else {
                std::vector<std::size_t> argmax;
                Tensor pooled = maxpool2x2_forward(x, train ? &argmax : nullptr);
                if (train) ct.pool_argmax.push_back(std::move(argmax));
                x = std::move(pooled);
                assert_finite(x, "maxpool");
            }
        }
        if (x.h != 1 || x.w != 1 || x.c != ch.flat_width)
            throw ShapeError("channel output shape " + x.shape_str() + " unexpected");
        for (int b = 0; b < batch; ++b)
            for (int c = 0; c < ch.flat_width; ++c)
                trace.concat.at(b, 0, 0, concat_off + c) = x.at(b, 0, 0, c);
        concat_off += ch.flat_width;
        if (train) trace.channels.push_back(std::move(ct));
    }

    Tensor x = trace.concat;
    for (auto& layer : model.dense) {
        trace.dense_inputs.push_back(x);
        Tensor z = dense_forward(x, layer.weights, layer.bias);
        if (layer.relu) z = relu_forward(z);
        x = std::move(z);
        assert_finite(x, "dense layer");
    }
    trace.logits = x;
    trace.probabilities = softmax2(trace.logits);
    return trace;
}

LossTerms compute_loss(const Tensor& probabilities,
                       const std::vector<std::array<double, 2>>& labels, Model& model,
                       double alpha) {
    const int batch = probabilities.n;
    if (batch == 0 || static_cast<int>(labels.size()) != batch)
        throw ShapeError("compute_loss: batch/labels mismatch");
    LossTerms terms;
    for (int b = 0; b < batch; ++b) {
        const auto& want = labels[b];
        if (!((want[0] == 0.0 || want[0] == 1.0) && (want[1] == 0.0 || want[1] == 1.0) &&
              want[0] + want[1] == 1.0))
            throw LabelError("labels must be one-hot");
        for (int c = 0; c < 2; ++c) {
            const double y = probabilities.at(b, 0, 0, c);
            const double clamped = std::min(std::max(y, 1e-12), 1.0);
            terms.ce -= want[c] * std::log(clamped);
            terms.se += (y - want[c]) * (y - want[c]);
        }
    }
    double w2 = 0.0;
    for (const auto& ref : model.parameters()) {
        if (!ref.weight) continue;
        for (std::size_t i = 0; i < ref.size; ++i) w2 += ref.value[i] * ref.value[i];
    }
    terms.reg = alpha * w2;
    terms.total = terms.ce + terms.se + terms.reg;
    return terms;
}

void model_backward(Model& model, const ModelTrace& trace,
                    const std::vector<std::array<double, 2>>& labels, double alpha) {
    if (!trace.train_mode)
        throw MissingTraceError("backward needs a train-mode forward trace");
    const int batch = trace.probabilities.n;
    if (static_cast<int>(labels.size()) != batch)
        throw ShapeError("model_backward: batch/labels mismatch");

    // d(total)/d(logits) through softmax for the ce + se terms
    Tensor grad(batch, 1, 1, 2);
    for (int b = 0; b < batch; ++b) {
        double gy[2];
        for (int c = 0; c < 2; ++c) {
            const double y = trace.probabilities.at(b, 0, 0, c);
            const double want = labels[b][c];
            double g_ce = 0.0;
            if (y > 1e-12) g_ce = -want / std::min(y, 1.0);
            const double g_se = 2.0 * (y - want);
            gy[c] = g_ce + g_se;
        }
        const double y0 = trace.probabilities.at(b, 0, 0, 0);
        const double y1 = trace.probabilities.at(b, 0, 0, 1);
        const double dot = gy[0] * y0 + gy[1] * y1;
        grad.at(b, 0, 0, 0) = y0 * (gy[0] - dot);
        grad.at(b, 0, 0, 1) = y1 * (gy[1] - dot);
    }

    // dense stack, reverse order
    for (int i = static_cast<int>(model.dense.size()) - 1; i >= 0; --i) {
        auto& layer = model.dense[i];
        if (layer.relu) {
            // recompute the layer output mask from the next layer's stored input
            const Tensor& out =
                (i + 1 < static_cast<int>(model.dense.size())) ? trace.dense_inputs[i + 1]
                                                               : trace.logits;
            grad = relu_backward(out, grad);
        }
        Tensor grad_in, grad_w;
        std::vector<double> grad_b;
        dense_backward(trace.dense_inputs[i], layer.weights, grad, grad_in, grad_w, grad_b);
        for (std::size_t k = 0; k < grad_w.size(); ++k)
            layer.d_weights.data[k] += grad_w.data[k];
        for (std::size_t k = 0; k < grad_b.size(); ++k) layer.d_bias[k] += grad_b[k];
        grad = std::move(grad_in);
    }

    // split the concat gradient back into channels
    int concat_off = 0;
    for (std::size_t ci = 0; ci < model.channels.size(); ++ci) {
        auto& ch = model.channels[ci];
        const ChannelTrace& ct = trace.channels[ci];
        Tensor g(batch, 1, 1, ch.flat_width);
        for (int b = 0; b < batch; ++b)
            for (int c = 0; c < ch.flat_width; ++c)
                g.at(b, 0, 0, c) = grad.at(b, 0, 0, concat_off + c);
        concat_off += ch.flat_width;

        int conv_idx = static_cast<int>(ch.convs.size());
        int pool_idx = static_cast<int>(ct.pool_argmax.size());
        for (int li = static_cast<int>(ch.layout.size()) - 1; li >= 0; --li) {
            const Tensor& input = ct.layer_inputs[li];
            if (ch.layout[li].kind == LayerSpec::Kind::Pool) {
                --pool_idx;
                // grad arrives shaped like the pool output
                Tensor go = g;
                go.n = input.n;
                go.h = (input.h + 1) / 2;
                go.w = (input.w + 1) / 2;
                go.c = input.c;
                g = maxpool2x2_backward(input, go, ct.pool_argmax[pool_idx]);
            } else {
                --conv_idx;
                auto& blk = ch.convs[conv_idx];
                Tensor go = g;
                go.n = input.n;
                go.h = input.h;
                go.w = input.w;
                go.c = blk.weights.n;
                Tensor after_relu = relu_backward(ct.post_relu[conv_idx], go);
                std::vector<double> d_scale, d_shift;
                Tensor after_bn =
                    batchnorm_backward(ct.pre_bn[conv_idx], blk.bn, ct.bn_caches[conv_idx],
                                       after_relu, d_scale, d_shift);
                for (std::size_t k = 0; k < d_scale.size(); ++k) {
                    blk.d_bn_scale[k] += d_scale[k];
                    blk.d_bn_shift[k] += d_shift[k];
                }
                Tensor grad_in, grad_w;
                std::vector<double> grad_b;
                conv2d_backward(input, blk.weights, after_bn, grad_in, grad_w, grad_b);
                for (std::size_t k = 0; k < grad_w.size(); ++k)
                    blk.d_weights.data[k] += grad_w.data[k];
                for (std::size_t k = 0; k < grad_b.size(); ++k) blk.d_bias[k] += grad_b[k];
                g = std::move(grad_in);
            }
        }
    }

    // L2 term
    for (auto& ref : model.parameters()) {
        if (!ref.weight) continue;
        for (std::size_t i = 0; i < ref.size; ++i) ref.grad[i] += 2.0 * alpha * ref.value[i];
    }
}

}  // namespace emgcs
