#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "emgcs/dataset.hpp"
#include "emgcs/dft.hpp"
#include "emgcs/errors.hpp"
#include "emgcs/features.hpp"
#include "emgcs/synth.hpp"

using namespace emgcs;
namespace fs = std::filesystem;

namespace {

SynthConfig quick_config() {
    SynthConfig cfg;
    cfg.subjects_per_class = 2;
    cfg.signal_length = 512;
    cfg.seed = 5;
    return cfg;
}

double mpf_of(const Recording& rec, double sample_rate) {
    const Spectrum s = dft_spectrum(rec.samples);
    return freq_features(s, sample_rate)[13];
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generation is deterministic per (config, label, subject seed)") {
    const SynthConfig cfg = quick_config();
    const SubjectBundle a = generate_subject(1, cfg, 42);
    const SubjectBundle b = generate_subject(1, cfg, 42);
    const SubjectBundle c = generate_subject(1, cfg, 43);
    REQUIRE(a.recording_count() == b.recording_count());
    bool all_equal = true, any_differs = false;
    for (int i = 0; i < kMuscles; ++i)
        for (int j = 0; j < kMovements; ++j)
            for (int k = 0; k < kTrials; ++k) {
                const Recording* ra = a.get(i, j, k);
                const Recording* rb = b.get(i, j, k);
                REQUIRE((ra != nullptr) == (rb != nullptr));
                if (ra && ra->samples != rb->samples) all_equal = false;
                const Recording* rc = c.get(i, j, k);
                if (ra && rc && ra->samples != rc->samples) any_differs = true;
            }
    CHECK(all_equal);
    CHECK(any_differs);
}

TEST_CASE("delta = 0 makes the class generators identical") {
    SynthConfig cfg = quick_config();
    cfg.delta = 0.0;
    const SubjectBundle healthy = generate_subject(0, cfg, 7);
    const SubjectBundle patient = generate_subject(1, cfg, 7);
    for (int i = 0; i < kMuscles; ++i)
        for (int j = 0; j < kMovements; ++j)
            for (int k = 0; k < kTrials; ++k) {
                const Recording* rh = healthy.get(i, j, k);
                const Recording* rp = patient.get(i, j, k);
                REQUIRE((rh != nullptr) == (rp != nullptr));
                if (rh) CHECK(rh->samples == rp->samples);
            }
}

TEST_CASE("no missingness: full 126 recordings, valid and extractable") {
    SynthConfig cfg = quick_config();
    cfg.signal_length = 512;
    SubjectBundle bundle = generate_subject(1, cfg, 3);
    bundle.subject_id = "x";
    CHECK(bundle.recording_count() == 126);
    bundle.validate();

    for (const auto& rec : bundle.recordings) {
        REQUIRE(rec);
        CHECK(static_cast<int>(rec->samples.size()) == cfg.signal_length);
        double mn = rec->samples[0], mx = rec->samples[0];
        for (double v : rec->samples) {
            CHECK(std::isfinite(v));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        CHECK(mx > mn);  // non-constant
    }

    // every feature family extracts without degenerate errors
    const auto grids = assemble_samples(bundle, AssemblyMode::Random(2, 1));
    for (const auto& g : grids) {
        const FeatureSample fs = extract_sample(g, {});
        for (int k = 0; k < 6; ++k)
            for (int cell = 0; cell < kCells; ++cell) CHECK(fs.present[k][cell]);
    }
}

TEST_CASE("missingness drops trials but never a whole (muscle, movement)") {
    SynthConfig cfg = quick_config();
    cfg.missingness = 0.5;
    const SubjectBundle bundle = generate_subject(0, cfg, 11);
    CHECK(bundle.recording_count() < 126);
    bundle.validate();  // at least one trial everywhere
    for (int i = 0; i < kMuscles; ++i)
        for (int j = 0; j < kMovements; ++j) {
            bool any = false;
            for (int k = 0; k < kTrials; ++k) any = any || bundle.get(i, j, k);
            CHECK(any);
        }
}

TEST_CASE("labels balanced exactly as configured") {
    SynthConfig cfg = quick_config();
    const fs::path dir = fs::temp_directory_path() / "emgcs_synth_balance";
    fs::remove_all(dir);
    const Manifest m = generate_dataset(cfg, dir);
    int healthy = 0, patient = 0;
    for (const auto& s : m.subjects) (s.label ? patient : healthy)++;
    CHECK(healthy == cfg.subjects_per_class);
    CHECK(patient == cfg.subjects_per_class);
    fs::remove_all(dir);
}

TEST_CASE("dataset on disk: layout, manifest, byte-identical regeneration") {
    SynthConfig cfg = quick_config();
    cfg.subjects_per_class = 2;
    cfg.signal_length = 128;
    const fs::path dir1 = fs::temp_directory_path() / "emgcs_synth_a";
    const fs::path dir2 = fs::temp_directory_path() / "emgcs_synth_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    const Manifest m1 = generate_dataset(cfg, dir1);
    const Manifest m2 = generate_dataset(cfg, dir2);
    CHECK(m1.subjects.size() == 4);

    // directory per subject, 126 files each at missingness 0
    for (const auto& s : m1.subjects) {
        CHECK(fs::is_directory(dir1 / s.subject_id));
        CHECK(s.recordings.size() == 126);
    }
    // identical bytes across regenerations
    CHECK(read_file(dir1 / "h000" / "m0_a0_t0.csv") ==
          read_file(dir2 / "h000" / "m0_a0_t0.csv"));
    CHECK(read_file(dir1 / "p001" / "m5_a6_t2.csv") ==
          read_file(dir2 / "p001" / "m5_a6_t2.csv"));

    // manifest round trip and bundle loading
    const Manifest loaded = load_manifest(dir1 / "manifest.json");
    REQUIRE(loaded.subjects.size() == 4);
    const SubjectBundle bundle = load_bundle(dir1, loaded.subjects[0]);
    CHECK(bundle.recording_count() == 126);

    // loaded signal matches the generated one to printed precision
    const SubjectBundle gen = generate_subject(0, cfg, subject_seed_for(cfg, 0, 0));
    const Recording* want = gen.get(0, 0, 0);
    const Recording* got = bundle.get(0, 0, 0);
    REQUIRE(want);
    REQUIRE(got);
    REQUIRE(want->samples.size() == got->samples.size());
    for (std::size_t t = 0; t < want->samples.size(); ++t)
        CHECK(got->samples[t] == want->samples[t]);  // %.17g is lossless

    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("delta = 1 separates mean mpf by at least 3 pooled stds somewhere") {
    SynthConfig cfg;
    cfg.subjects_per_class = 8;
    cfg.signal_length = 4096;
    cfg.delta = 1.0;
    cfg.seed = 99;

    // per-class mpf samples for every (muscle, movement) cell, trial 0
    std::vector<std::vector<double>> mpf[2];
    mpf[0].assign(kCells, {});
    mpf[1].assign(kCells, {});
    for (int label = 0; label < 2; ++label)
        for (int s = 0; s < cfg.subjects_per_class; ++s) {
            const SubjectBundle b =
                generate_subject(label, cfg, subject_seed_for(cfg, label, s));
            for (int i = 0; i < kMuscles; ++i)
                for (int j = 0; j < kMovements; ++j)
                    mpf[label][i * kMovements + j].push_back(
                        mpf_of(*b.get(i, j, 0), cfg.sample_rate));
        }

    double best_sep = 0.0;
    for (int cell = 0; cell < kCells; ++cell) {
        auto stats = [](const std::vector<double>& v) {
            double m = 0.0, var = 0.0;
            for (double x : v) m += x;
            m /= v.size();
            for (double x : v) var += (x - m) * (x - m);
            var /= v.size();
            return std::pair<double, double>(m, std::sqrt(var));
        };
        const auto [m0, s0] = stats(mpf[0][cell]);
        const auto [m1, s1] = stats(mpf[1][cell]);
        const double pooled = std::sqrt((s0 * s0 + s1 * s1) / 2.0);
        if (pooled > 0.0) best_sep = std::max(best_sep, std::abs(m1 - m0) / pooled);
    }
    MESSAGE("best mpf separation: ", best_sep, " pooled stds");
    CHECK(best_sep >= 3.0);
}

TEST_CASE("config validation and json round trip") {
    SynthConfig cfg = quick_config();
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = quick_config();
    cfg.signal_length = 32;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = quick_config();
    cfg.missingness = 0.25;
    const SynthConfig back = SynthConfig::from_json(cfg.to_json());
    CHECK(back.subjects_per_class == cfg.subjects_per_class);
    CHECK(back.signal_length == cfg.signal_length);
    CHECK(back.delta == cfg.delta);
    CHECK(back.missingness == cfg.missingness);
    CHECK(back.seed == cfg.seed);
}
