#include "emgcs/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "emgcs/errors.hpp"
#include "emgcs/rng.hpp"

namespace emgcs {

void TrainConfig::validate() const {
    if (batch_size < 2)
        throw ConfigError("batch_size must be >= 2 (batch normalization), got " +
                          std::to_string(batch_size));
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (max_epoch < 1) throw ConfigError("max_epoch must be >= 1");
    if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
    if (alpha < 0.0) throw ConfigError("alpha must be non-negative");
    model_config().validate();  // covers channel_mask, filter_size, widths
}

ModelConfig TrainConfig::model_config() const {
    ModelConfig mc;
    mc.channel_mask = channel_mask;
    mc.kernel_counts = kernel_counts;
    mc.filter_size = filter_size;
    mc.dense_widths = dense_widths;
    mc.seed = seed;
    return mc;
}

void AdamState::init(const std::vector<ParamRef>& params) {
    step = 0;
    m.clear();
    v.clear();
    for (const auto& p : params) {
        m.emplace_back(p.size, 0.0);
        v.emplace_back(p.size, 0.0);
    }
}

void adam_step(std::vector<ParamRef>& params, AdamState& state, double learning_rate) {
    if (state.m.size() != params.size())
        throw ShapeError("adam_step: state holds " + std::to_string(state.m.size()) +
                         " tensors, model has " + std::to_string(params.size()));
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        auto& p = params[t];
        if (state.m[t].size() != p.size)
            throw ShapeError("adam_step: shape mismatch for " + p.name);
        double* m = state.m[t].data();
        double* v = state.v[t].data();
#pragma omp parallel for schedule(static)
        for (long i = 0; i < static_cast<long>(p.size); ++i) {
            const double g = p.grad[i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p.value[i] -= learning_rate * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

std::vector<LabeledGrids> scale_samples(const std::vector<FeatureSample>& samples,
                                        const ScalerStats& stats) {
    std::vector<LabeledGrids> out(samples.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < static_cast<long>(samples.size()); ++i) {
        const auto grids = apply_scaler(samples[i], stats);
        for (int k = 0; k < 6; ++k) out[i].grids[k] = grids[k].values;
        out[i].label = samples[i].label;
        out[i].subject_id = samples[i].subject_id;
    }
    return out;
}

namespace {

// gather one minibatch into batched per-family tensors
std::array<Tensor, 6> gather_batch(const std::vector<LabeledGrids>& samples,
                                   const int* indices, int count,
                                   std::vector<std::array<double, 2>>* labels) {
    std::array<Tensor, 6> batch;
    for (int k = 0; k < 6; ++k) {
        const Tensor& proto = samples[indices[0]].grids[k];
        batch[k] = Tensor(count, proto.h, proto.w, proto.c);
        const std::size_t stride = proto.size();
        for (int b = 0; b < count; ++b)
            std::copy(samples[indices[b]].grids[k].data.begin(),
                      samples[indices[b]].grids[k].data.end(),
                      batch[k].data.begin() + b * stride);
    }
    if (labels) {
        labels->resize(count);
        for (int b = 0; b < count; ++b)
            (*labels)[b] = one_hot(samples[indices[b]].label);
    }
    return batch;
}

Model clone_model(const Model& model) { return model; }

}  // namespace

TrainResult train_model(const std::vector<LabeledGrids>& train,
                        const std::vector<LabeledGrids>& validation,
                        const TrainConfig& config, bool quiet) {
    config.validate();
    if (train.empty() || validation.empty())
        throw ConfigError("train and validation sets must be non-empty");

    {
        bool has0 = false, has1 = false;
        for (const auto& s : validation) (s.label ? has1 : has0) = true;
        if (!(has0 && has1))
            std::fprintf(stderr,
                         "warning: validation set contains a single class; accuracy is "
                         "still defined but weakly informative\n");
    }

    Model model = make_model(config.model_config());
    auto params = model.parameters();
    AdamState adam;
    adam.init(params);

    TrainResult result;
    result.history.best_round = 0;
    double best_acc = -1.0;

    Rng shuffle_rng(mix_seed(config.seed, 0x5affULL));
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    const auto t0 = std::chrono::steady_clock::now();

    for (int epoch = 1; epoch <= config.max_epoch; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        LossTerms epoch_loss;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const int count =
                static_cast<int>(std::min<std::size_t>(config.batch_size,
                                                       order.size() - start));
            if (count < 2) continue;  // batchnorm cannot see a single sample
            std::vector<std::array<double, 2>> labels;
            const auto batch = gather_batch(train, order.data() + start, count, &labels);

            ModelTrace trace = model_forward(model, batch, true);
            const LossTerms loss =
                compute_loss(trace.probabilities, labels, model, config.alpha);
            epoch_loss.ce += loss.ce;
            epoch_loss.se += loss.se;
            epoch_loss.reg = loss.reg;  // snapshot, not a sum over batches
            epoch_loss.total += loss.total;

            model.zero_grads();
            model_backward(model, trace, labels, config.alpha);
            adam_step(params, adam, config.learning_rate);
        }

        const auto preds = predict(model, validation);
        const double acc = accuracy_of(preds, validation);

        EvalRound round;
        round.round = epoch;
        round.train_loss = epoch_loss;
        round.val_accuracy = acc;
        round.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        round.is_best = acc > best_acc;
        if (round.is_best) {
            best_acc = acc;
            result.history.best_round = epoch;
            result.model = clone_model(model);
        }
        result.history.rounds.push_back(round);
        if (!quiet)
            std::fprintf(stderr, "epoch %d  loss %.4f  val_acc %.4f%s\n", epoch,
                         epoch_loss.total, acc, round.is_best ? "  (best)" : "");

        if (epoch - result.history.best_round >= config.early_stop_patience) {
            result.history.stop_reason = "early-stop";
            return result;
        }
    }
    result.history.stop_reason = "max-epoch";
    return result;
}

std::vector<Prediction> predict(Model& model, const std::vector<LabeledGrids>& samples,
                                int chunk) {
    std::vector<Prediction> preds;
    preds.reserve(samples.size());
    for (const auto& s : samples)
        for (const auto& g : s.grids)
            if (!g.data.empty() && !g.all_finite())
                throw InvalidSignalError("predict: non-finite input (unscaled features?)");

    std::vector<int> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t start = 0; start < samples.size();
         start += static_cast<std::size_t>(chunk)) {
        const int count = static_cast<int>(
            std::min<std::size_t>(chunk, samples.size() - start));
        const auto batch = gather_batch(samples, idx.data() + start, count, nullptr);
        ModelTrace trace = model_forward(model, batch, false);
        for (int b = 0; b < count; ++b) {
            Prediction p;
            p.p_healthy = trace.probabilities.at(b, 0, 0, 0);
            p.p_patient = trace.probabilities.at(b, 0, 0, 1);
            p.tie = p.p_patient == p.p_healthy;
            p.label = p.p_patient >= p.p_healthy ? 1 : 0;
            preds.push_back(p);
        }
    }
    return preds;
}

double accuracy_of(const std::vector<Prediction>& preds,
                   const std::vector<LabeledGrids>& samples) {
    if (preds.size() != samples.size() || preds.empty())
        throw ShapeError("accuracy_of: size mismatch or empty");
    int correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i].label == samples[i].label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

void save_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write history " + path);
    out << "round,train_ce,train_se,train_reg,train_total,val_accuracy,is_best\n";
    char line[256];
    for (const auto& r : history.rounds) {
        std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.round,
                      r.train_loss.ce, r.train_loss.se, r.train_loss.reg, r.train_loss.total,
                      r.val_accuracy, r.is_best ? 1 : 0);
        out << line;
    }
}

}  // namespace emgcs
