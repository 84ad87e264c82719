#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "emgcs/checkpoint.hpp"
#include "emgcs/container.hpp"
#include "emgcs/errors.hpp"

using namespace emgcs;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "emgcs_test_ckpt";
    fs::create_directories(dir);
    return dir / name;
}

TrainConfig small_train_config() {
    TrainConfig cfg;
    cfg.kernel_counts = {4, 3};
    cfg.dense_widths = {8, 4, 2};
    cfg.batch_size = 4;
    cfg.seed = 17;
    return cfg;
}

std::vector<LabeledGrids> random_samples(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<LabeledGrids> out(count);
    for (int i = 0; i < count; ++i) {
        out[i].label = static_cast<int>(rng() % 2);
        for (int k = 0; k < 6; ++k) {
            out[i].grids[k] = Tensor(1, kMuscles, kMovements, kFamilyDepth[k]);
            for (auto& v : out[i].grids[k].data) v = g(rng);
        }
    }
    return out;
}

ScalerStats dummy_scaler() {
    ScalerStats stats;
    stats.mean.assign(kTotalFeatures, 0.25);
    stats.stddev.assign(kTotalFeatures, 2.0);
    stats.imputation.assign(kTotalFeatures, 0.25);
    stats.passthrough.assign(kTotalFeatures, false);
    stats.feature_config.wavelet = "db2";
    return stats;
}

}  // namespace

TEST_CASE("round trip reproduces bit-identical predictions") {
    const TrainConfig tcfg = small_train_config();
    Model model = make_model(tcfg.model_config());
    // nudge BN running stats away from defaults so they must round-trip too
    for (auto& [name, vec] : model.bn_running_state())
        for (auto& v : *vec) v += 0.125;

    const fs::path path = temp_path("roundtrip.bin");
    save_model(model, dummy_scaler(), tcfg, path);
    Checkpoint loaded = load_model(path);

    CHECK(loaded.scaler.feature_config.wavelet == "db2");
    CHECK(loaded.train_config.kernel_counts == tcfg.kernel_counts);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto batch = random_samples(5, 1000 + seed);
        const auto a = predict(model, batch);
        const auto b = predict(loaded.model, batch);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].p_healthy == b[i].p_healthy);  // exact
            CHECK(a[i].p_patient == b[i].p_patient);
            CHECK(a[i].label == b[i].label);
        }
    }
}

TEST_CASE("truncated checkpoint is a checksum error, nothing partial returned") {
    const TrainConfig tcfg = small_train_config();
    Model model = make_model(tcfg.model_config());
    const fs::path path = temp_path("truncated.bin");
    save_model(model, dummy_scaler(), tcfg, path);

    const auto size = fs::file_size(path);
    fs::resize_file(path, size - 512);
    CHECK_THROWS_AS(load_model(path), ChecksumError);
}

TEST_CASE("flipped byte is a checksum error") {
    const TrainConfig tcfg = small_train_config();
    Model model = make_model(tcfg.model_config());
    const fs::path path = temp_path("corrupt.bin");
    save_model(model, dummy_scaler(), tcfg, path);

    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    char c;
    f.seekg(200);
    f.get(c);
    f.seekp(200);
    f.put(static_cast<char>(c ^ 0x40));
    f.close();
    CHECK_THROWS_AS(load_model(path), ChecksumError);
}

TEST_CASE("newer schema version is refused with an explicit version error") {
    const fs::path path = temp_path("future.bin");
    const char magic[8] = {'E', 'M', 'G', 'C', 'S', 'N', 'E', 'T'};
    container::write_file(path, magic, 99, "{}", {});
    CHECK_THROWS_AS(load_model(path), VersionError);
}

TEST_CASE("wrong file type is rejected") {
    const fs::path path = temp_path("wrongmagic.bin");
    const char magic[8] = {'N', 'O', 'T', 'A', 'C', 'K', 'P', 'T'};
    container::write_file(path, magic, 1, "{}", {});
    CHECK_THROWS_AS(load_model(path), ParseError);

    const fs::path text = temp_path("text.bin");
    std::ofstream(text) << "hello";
    CHECK_THROWS_AS(load_model(text), Error);
}

TEST_CASE("config json round trips") {
    TrainConfig tcfg = small_train_config();
    tcfg.channel_mask = {true, false, true, true, false, true};
    tcfg.learning_rate = 1.25e-4;
    const TrainConfig back = train_config_from_json(train_config_to_json(tcfg));
    CHECK(back.channel_mask == tcfg.channel_mask);
    CHECK(back.learning_rate == tcfg.learning_rate);
    CHECK(back.kernel_counts == tcfg.kernel_counts);

    FeatureConfig fcfg;
    fcfg.rms_sqrt = true;
    fcfg.sample_rate = 2000.0;
    const FeatureConfig fback = feature_config_from_json(feature_config_to_json(fcfg));
    CHECK(fback == fcfg);
}
