#include "emgcs/checkpoint.hpp"

#include <json.hpp>

#include "emgcs/container.hpp"
#include "emgcs/errors.hpp"

namespace emgcs {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'E', 'M', 'G', 'C', 'S', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;

json model_config_json(const ModelConfig& c) {
    return json{{"channel_mask", c.channel_mask},
                {"kernel_counts", c.kernel_counts},
                {"filter_size", c.filter_size},
                {"dense_widths", c.dense_widths},
                {"input_depths", c.input_depths},
                {"grid_h", c.grid_h},
                {"grid_w", c.grid_w},
                {"bn_momentum", c.bn_momentum},
                {"bn_eps", c.bn_eps},
                {"seed", c.seed}};
}

ModelConfig model_config_from(const json& j) {
    ModelConfig c;
    c.channel_mask = j.at("channel_mask").get<std::array<bool, 6>>();
    c.kernel_counts = j.at("kernel_counts").get<std::vector<int>>();
    c.filter_size = j.at("filter_size").get<int>();
    c.dense_widths = j.at("dense_widths").get<std::vector<int>>();
    c.input_depths = j.at("input_depths").get<std::array<int, 6>>();
    c.grid_h = j.at("grid_h").get<int>();
    c.grid_w = j.at("grid_w").get<int>();
    c.bn_momentum = j.at("bn_momentum").get<double>();
    c.bn_eps = j.at("bn_eps").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json train_config_json(const TrainConfig& c) {
    return json{{"batch_size", c.batch_size},
                {"learning_rate", c.learning_rate},
                {"max_epoch", c.max_epoch},
                {"early_stop_patience", c.early_stop_patience},
                {"alpha", c.alpha},
                {"seed", c.seed},
                {"channel_mask", c.channel_mask},
                {"filter_size", c.filter_size},
                {"kernel_counts", c.kernel_counts},
                {"dense_widths", c.dense_widths}};
}

TrainConfig train_config_from(const json& j) {
    TrainConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_epoch = j.value("max_epoch", c.max_epoch);
    c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
    c.alpha = j.value("alpha", c.alpha);
    c.seed = j.value("seed", c.seed);
    c.channel_mask = j.value("channel_mask", c.channel_mask);
    c.filter_size = j.value("filter_size", c.filter_size);
    c.kernel_counts = j.value("kernel_counts", c.kernel_counts);
    c.dense_widths = j.value("dense_widths", c.dense_widths);
    return c;
}

json feature_config_json(const FeatureConfig& c) {
    return json{{"rms_sqrt", c.rms_sqrt},
                {"wavelet", c.wavelet},
                {"dwt_padding", c.dwt_padding},
                {"entropy_bins", c.entropy_bins},
                {"mode_bins", c.mode_bins},
                {"sample_rate", c.sample_rate},
                {"log_floor", c.log_floor}};
}

FeatureConfig feature_config_from(const json& j) {
    FeatureConfig c;
    c.rms_sqrt = j.value("rms_sqrt", c.rms_sqrt);
    c.wavelet = j.value("wavelet", c.wavelet);
    c.dwt_padding = j.value("dwt_padding", c.dwt_padding);
    c.entropy_bins = j.value("entropy_bins", c.entropy_bins);
    c.mode_bins = j.value("mode_bins", c.mode_bins);
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    c.log_floor = j.value("log_floor", c.log_floor);
    return c;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& c) { return model_config_json(c).dump(); }
ModelConfig model_config_from_json(const std::string& text) {
    return model_config_from(json::parse(text));
}
std::string train_config_to_json(const TrainConfig& c) { return train_config_json(c).dump(); }
TrainConfig train_config_from_json(const std::string& text) {
    return train_config_from(json::parse(text));
}
std::string feature_config_to_json(const FeatureConfig& c) {
    return feature_config_json(c).dump();
}
FeatureConfig feature_config_from_json(const std::string& text) {
    return feature_config_from(json::parse(text));
}

void save_model(Model& model, const ScalerStats& scaler, const TrainConfig& train_config,
                const std::filesystem::path& path) {
    json header;
    header["kind"] = "checkpoint";
    header["model_config"] = model_config_json(model.config);
    header["train_config"] = train_config_json(train_config);
    header["scaler"] = json::parse(scaler.to_json());

    std::vector<double> blob;
    json manifest = json::array();
    for (const auto& p : model.parameters()) {
        manifest.push_back({{"name", p.name}, {"size", p.size}});
        blob.insert(blob.end(), p.value, p.value + p.size);
    }
    json state_manifest = json::array();
    for (const auto& [name, vec] : model.bn_running_state()) {
        state_manifest.push_back({{"name", name}, {"size", vec->size()}});
        blob.insert(blob.end(), vec->begin(), vec->end());
    }
    header["params"] = std::move(manifest);
    header["bn_state"] = std::move(state_manifest);

    container::write_file(path, kMagic, kVersion, header.dump(), blob);
}

Checkpoint load_model(const std::filesystem::path& path) {
    const auto loaded = container::read_file(path, kMagic, kVersion);
    json header;
    try {
        header = json::parse(loaded.header_json);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": bad checkpoint header: " + e.what());
    }
    if (header.value("kind", "") != "checkpoint")
        throw ParseError(path.string() + ": not a checkpoint");

    Checkpoint ckpt;
    ckpt.model = make_model(model_config_from(header.at("model_config")));
    ckpt.scaler = ScalerStats::from_json(header.at("scaler").dump());
    ckpt.train_config = train_config_from(header.at("train_config"));

    std::size_t off = 0;
    auto read_block = [&](double* dst, std::size_t size, const std::string& name,
                          const json& entry) {
        if (entry.at("name").get<std::string>() != name ||
            entry.at("size").get<std::size_t>() != size)
            throw ParseError(path.string() + ": parameter layout mismatch at " + name);
        if (off + size > loaded.blob.size())
            throw ChecksumError(path.string() + ": blob shorter than manifest");
        std::copy(loaded.blob.begin() + off, loaded.blob.begin() + off + size, dst);
        off += size;
    };

    const auto& manifest = header.at("params");
    auto params = ckpt.model.parameters();
    if (manifest.size() != params.size())
        throw ParseError(path.string() + ": parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i)
        read_block(params[i].value, params[i].size, params[i].name, manifest[i]);

    const auto& state_manifest = header.at("bn_state");
    auto state = ckpt.model.bn_running_state();
    if (state_manifest.size() != state.size())
        throw ParseError(path.string() + ": BN state count mismatch");
    for (std::size_t i = 0; i < state.size(); ++i)
        read_block(state[i].second->data(), state[i].second->size(), state[i].first,
                   state_manifest[i]);

    if (off != loaded.blob.size())
        throw ChecksumError(path.string() + ": blob longer than manifest");
    return ckpt;
}

}  // namespace emgcs
