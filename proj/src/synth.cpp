#include "emgcs/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "emgcs/errors.hpp"
#include "emgcs/rng.hpp"

namespace emgcs {

using nlohmann::json;

void SynthConfig::validate() const {
    if (subjects_per_class < 1) throw ConfigError("subjects_per_class must be >= 1");
    if (signal_length < 64) throw ConfigError("signal_length must be >= 64");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    if (delta < 0.0 || delta > 1.0) throw ConfigError("delta must be in [0,1]");
    if (missingness < 0.0 || missingness > 1.0)
        throw ConfigError("missingness must be in [0,1]");
}

std::string SynthConfig::to_json() const {
    json j;
    j["subjects_per_class"] = subjects_per_class;
    j["signal_length"] = signal_length;
    j["sample_rate"] = sample_rate;
    j["delta"] = delta;
    j["missingness"] = missingness;
    j["seed"] = seed;
    return j.dump();
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("synth config: ") + e.what());
    }
    SynthConfig c;
    c.subjects_per_class = j.value("subjects_per_class", c.subjects_per_class);
    c.signal_length = j.value("signal_length", c.signal_length);
    c.sample_rate = j.value("sample_rate", c.sample_rate);
    c.delta = j.value("delta", c.delta);
    c.missingness = j.value("missingness", c.missingness);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

std::uint64_t subject_seed_for(const SynthConfig& config, int label, int index) {
    return mix_seed(config.seed, 0x5ceedULL, static_cast<std::uint64_t>(label),
                    static_cast<std::uint64_t>(index));
}

namespace {

std::vector<double> ar2_signal(double freq_hz, double pole_radius, double amplitude,
                               double sample_rate, int length, Rng& rng) {
    const double theta = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const double phi1 = 2.0 * pole_radius * std::cos(theta);
    const double phi2 = -pole_radius * pole_radius;
    std::normal_distribution<double> g(0.0, 1.0);

    const int burn = 512;
    std::vector<double> x(length + burn, 0.0);
    for (int t = 2; t < length + burn; ++t)
        x[t] = phi1 * x[t - 1] + phi2 * x[t - 2] + amplitude * g(rng);
    return {x.begin() + burn, x.end()};
}

}  // namespace

SubjectBundle generate_subject(int label, const SynthConfig& config,
                               std::uint64_t subject_seed) {
    config.validate();
    if (label != 0 && label != 1) throw LabelError("label must be 0 or 1");
    const double d = config.delta * label;

    SubjectBundle bundle;
    bundle.label = label;

    // subject-level individuality, independent of the label so delta = 0
    // collapses the two class distributions exactly
    Rng subj_rng(mix_seed(subject_seed, 0xA11CEULL));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double subj_freq_shift = u(subj_rng);                  // +-1 Hz
    const double subj_amp_factor = 1.0 + 0.03 * u(subj_rng);

    for (int i = 0; i < kMuscles; ++i)
        for (int j = 0; j < kMovements; ++j) {
            const double base_freq = 45.0 + 9.0 * i + 5.0 * j + subj_freq_shift;
            const double freq = base_freq + d * 28.0;
            const double radius = 0.94 + d * 0.02;
            const double amp =
                (1.0 + 0.12 * i + 0.06 * j) * (1.0 + d * 1.5) * subj_amp_factor;

            // per-(muscle,movement) trial omission, never dropping all three
            Rng miss_rng(mix_seed(subject_seed, 0xB10CULL,
                                  static_cast<std::uint64_t>(i * kMovements + j)));
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            std::array<bool, kTrials> keep{};
            bool any = false;
            for (int k = 0; k < kTrials; ++k) {
                keep[k] = u01(miss_rng) >= config.missingness;
                any = any || keep[k];
            }
            if (!any) keep[miss_rng() % kTrials] = true;

            for (int k = 0; k < kTrials; ++k) {
                if (!keep[k]) continue;
                Rng trial_rng(mix_seed(subject_seed, static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(j),
                                       static_cast<std::uint64_t>(k)));
                std::uniform_real_distribution<double> tu(-1.0, 1.0);
                const double f_t = freq + 1.5 * tu(trial_rng);
                const double r_t =
                    std::clamp(radius + 0.004 * tu(trial_rng), 0.5, 0.985);
                const double a_t = amp * (1.0 + 0.04 * tu(trial_rng));

                Recording rec;
                rec.muscle = i;
                rec.movement = j;
                rec.trial = k;
                rec.samples = ar2_signal(f_t, r_t, a_t, config.sample_rate,
                                         config.signal_length, trial_rng);
                bundle.put(std::move(rec));
            }
        }
    bundle.validate();
    return bundle;
}

Manifest generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir);

    Manifest manifest;
    manifest.generator_config = config.to_json();

    char idbuf[32];
    for (int label = 0; label < 2; ++label) {
        for (int idx = 0; idx < config.subjects_per_class; ++idx) {
            std::snprintf(idbuf, sizeof idbuf, "%s%03d", label ? "p" : "h", idx);
            const std::string subject_id = idbuf;
            SubjectBundle bundle =
                generate_subject(label, config, subject_seed_for(config, label, idx));
            bundle.subject_id = subject_id;

            const std::filesystem::path subj_dir = out_dir / subject_id;
            std::filesystem::create_directories(subj_dir);

            ManifestSubject ms;
            ms.subject_id = subject_id;
            ms.label = label;
            for (int i = 0; i < kMuscles; ++i)
                for (int j = 0; j < kMovements; ++j)
                    for (int k = 0; k < kTrials; ++k) {
                        const Recording* rec = bundle.get(i, j, k);
                        if (!rec) continue;
                        const std::string fname = recording_filename(i, j, k);
                        std::ofstream out(subj_dir / fname);
                        if (!out)
                            throw IoError("cannot write " + (subj_dir / fname).string());
                        char line[40];
                        for (double v : rec->samples) {
                            std::snprintf(line, sizeof line, "%.17g\n", v);
                            out << line;
                        }
                        ms.recordings.push_back({i, j, k, subject_id + "/" + fname});
                    }
            manifest.subjects.push_back(std::move(ms));
        }
    }
    save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

}  // namespace emgcs
