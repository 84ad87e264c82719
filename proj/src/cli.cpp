#include "emgcs/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "emgcs/checkpoint.hpp"
#include "emgcs/dataset.hpp"
#include "emgcs/errors.hpp"
#include "emgcs/feature_store.hpp"
#include "emgcs/features.hpp"
#include "emgcs/metrics.hpp"
#include "emgcs/rng.hpp"
#include "emgcs/synth.hpp"
#include "emgcs/train.hpp"

namespace emgcs::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool verbose_env() {
    const char* v = std::getenv("EMGCS_VERBOSE");
    return v && std::string(v) != "0" && std::string(v) != "";
}

void require_writable(const fs::path& path, bool force) {
    if (fs::exists(path) && !force)
        throw IoError(path.string() + " exists; pass --force to overwrite");
}

json load_config_file(const std::string& path, const std::set<std::string>& sections) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    for (const auto& [key, _] : j.items())
        if (!sections.count(key))
            throw ConfigError("config " + path + ": unknown section '" + key + "'");
    return j;
}

void check_keys(const json& j, const std::set<std::string>& known, const char* section) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw ConfigError(std::string("config section '") + section +
                              "': unknown key '" + key + "'");
}

FeatureConfig feature_config_from_section(const json& j) {
    check_keys(j, {"rms_sqrt", "wavelet", "dwt_padding", "entropy_bins", "mode_bins",
                   "sample_rate", "log_floor"},
               "features");
    return feature_config_from_json(j.dump());
}

std::array<bool, 6> parse_channel_list(const std::string& text) {
    std::array<bool, 6> mask{};
    int idx = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == ',') continue;
        if ((c != '0' && c != '1') || idx >= 6)
            throw ConfigError("--channels expects six comma-separated 0/1 flags, got '" +
                              text + "'");
        mask[idx++] = c == '1';
    }
    if (idx != 6)
        throw ConfigError("--channels expects six flags, got " + std::to_string(idx));
    return mask;
}

// ---------------------------------------------------------------- generate
int cmd_generate(const std::string& config_path, const std::string& out,
                 const SynthConfig& cli_values, const std::set<std::string>& cli_flags,
                 bool force) {
    const json cfg = load_config_file(config_path, {"synth"});
    SynthConfig synth;
    if (cfg.contains("synth")) {
        check_keys(cfg["synth"],
                   {"subjects_per_class", "signal_length", "sample_rate", "delta",
                    "missingness", "seed"},
                   "synth");
        synth = SynthConfig::from_json(cfg["synth"].dump());
    }
    // explicit flags win over the file
    if (cli_flags.count("subjects")) synth.subjects_per_class = cli_values.subjects_per_class;
    if (cli_flags.count("length")) synth.signal_length = cli_values.signal_length;
    if (cli_flags.count("sample-rate")) synth.sample_rate = cli_values.sample_rate;
    if (cli_flags.count("delta")) synth.delta = cli_values.delta;
    if (cli_flags.count("missingness")) synth.missingness = cli_values.missingness;
    if (cli_flags.count("seed")) synth.seed = cli_values.seed;
    synth.validate();
    const fs::path out_dir(out);
    require_writable(out_dir / "manifest.json", force);
    const Manifest m = generate_dataset(synth, out_dir);
    std::printf("generated %zu subjects under %s\n", m.subjects.size(), out.c_str());
    return 0;
}

// ---------------------------------------------------------------- split
int cmd_split(const std::string& data_dir, const std::string& out, std::uint64_t seed,
              bool force) {
    const Manifest m = load_manifest(fs::path(data_dir) / "manifest.json");
    std::vector<std::pair<std::string, int>> subjects;
    for (const auto& s : m.subjects) subjects.push_back({s.subject_id, s.label});
    const DatasetSplit split = split_subjects(subjects, seed);
    require_writable(out, force);
    save_split(split, out);
    std::printf("split %zu subjects into %zu/%zu/%zu (train/validation/test)\n",
                subjects.size(), split.train.size(), split.validation.size(),
                split.test.size());
    return 0;
}

// ---------------------------------------------------------------- extract
int cmd_extract(const std::string& config_path, const std::string& data_dir,
                const std::string& split_path, const std::string& out_dir,
                const FeatureConfig& cli_values, const std::set<std::string>& cli_flags,
                int samples_per_subject, std::uint64_t assembly_seed, bool exhaustive,
                bool csv, bool force) {
    const json cfg = load_config_file(config_path, {"features"});
    FeatureConfig fcfg;
    if (cfg.contains("features")) fcfg = feature_config_from_section(cfg["features"]);
    if (cli_flags.count("wavelet")) fcfg.wavelet = cli_values.wavelet;
    if (cli_flags.count("dwt-padding")) fcfg.dwt_padding = cli_values.dwt_padding;
    if (cli_flags.count("rms-sqrt")) fcfg.rms_sqrt = cli_values.rms_sqrt;
    if (cli_flags.count("sample-rate")) fcfg.sample_rate = cli_values.sample_rate;
    if (cli_flags.count("entropy-bins")) fcfg.entropy_bins = cli_values.entropy_bins;
    if (cli_flags.count("mode-bins")) fcfg.mode_bins = cli_values.mode_bins;

    const Manifest manifest = load_manifest(fs::path(data_dir) / "manifest.json");

    DatasetSplit split;
    bool have_split = !split_path.empty();
    if (have_split) split = load_split(split_path);

    auto part_of = [&](const std::string& id) -> int {
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), id) != v.end();
        };
        if (!have_split) return 0;
        if (in(split.train)) return 0;
        if (in(split.validation)) return 1;
        if (in(split.test)) return 2;
        return -1;
    };

    const int nparts = have_split ? 3 : 1;
    std::vector<FeatureStore> stores(nparts);
    for (auto& s : stores) s.config = fcfg;

    int total_rejected = 0;
    for (const auto& subject : manifest.subjects) {
        const int part = part_of(subject.subject_id);
        if (part < 0)
            throw ConfigError("subject " + subject.subject_id + " is not in the split");
        const SubjectBundle bundle = load_bundle(data_dir, subject);
        const AssemblyMode mode =
            exhaustive ? AssemblyMode::Exhaustive()
                       : AssemblyMode::Random(
                             samples_per_subject,
                             mix_seed(assembly_seed,
                                      std::hash<std::string>{}(subject.subject_id)));
        const auto grids = assemble_samples(bundle, mode);
        int rejected = 0;
        auto samples = extract_samples(grids, fcfg, &rejected);
        total_rejected += rejected;
        for (auto& s : samples) stores[part].samples.push_back(std::move(s));
        if (verbose_env())
            std::fprintf(stderr, "extracted %s: %zu samples (%d rejected)\n",
                         subject.subject_id.c_str(), samples.size(), rejected);
    }

    fs::create_directories(out_dir);
    const char* names[3] = {"train", "validation", "test"};
    for (int p = 0; p < nparts; ++p) {
        const std::string stem = have_split ? std::string("features_") + names[p]
                                            : std::string("features_all");
        const fs::path bin = fs::path(out_dir) / (stem + ".bin");
        require_writable(bin, force);
        save_feature_store(stores[p], bin);
        if (csv) {
            const fs::path txt = fs::path(out_dir) / (stem + ".csv");
            require_writable(txt, force);
            export_feature_csv(stores[p], txt);
        }
        std::printf("%s: %zu samples\n", bin.string().c_str(), stores[p].samples.size());
    }
    if (total_rejected)
        std::fprintf(stderr, "warning: %d samples rejected as unusable\n", total_rejected);
    return 0;
}

// ---------------------------------------------------------------- train
int cmd_train(const std::string& config_path, const std::string& train_store_path,
              const std::string& val_store_path, const std::string& out,
              const std::string& history_path, TrainConfig tcfg,
              const std::set<std::string>& cli_flags, bool force) {
    const json cfg = load_config_file(config_path, {"train"});
    if (cfg.contains("train")) {
        check_keys(cfg["train"],
                   {"batch_size", "learning_rate", "max_epoch", "early_stop_patience",
                    "alpha", "seed", "channel_mask", "filter_size", "kernel_counts",
                    "dense_widths"},
                   "train");
        TrainConfig file_cfg = train_config_from_json(cfg["train"].dump());
        // CLI flags win over the file
        if (cli_flags.count("batch-size")) file_cfg.batch_size = tcfg.batch_size;
        if (cli_flags.count("lr")) file_cfg.learning_rate = tcfg.learning_rate;
        if (cli_flags.count("max-epoch")) file_cfg.max_epoch = tcfg.max_epoch;
        if (cli_flags.count("patience"))
            file_cfg.early_stop_patience = tcfg.early_stop_patience;
        if (cli_flags.count("alpha")) file_cfg.alpha = tcfg.alpha;
        if (cli_flags.count("seed")) file_cfg.seed = tcfg.seed;
        if (cli_flags.count("channels")) file_cfg.channel_mask = tcfg.channel_mask;
        if (cli_flags.count("filter-size")) file_cfg.filter_size = tcfg.filter_size;
        tcfg = file_cfg;
    }
    tcfg.validate();

    const FeatureStore train_store = load_feature_store(train_store_path);
    const FeatureStore val_store = load_feature_store(val_store_path);
    if (!(train_store.config == val_store.config))
        throw VersionError("train and validation stores use different feature options");
    if (train_store.samples.empty() || val_store.samples.empty())
        throw ConfigError("train/validation stores must be non-empty");

    const ScalerStats scaler = fit_scaler(train_store.samples, train_store.config);
    const auto train_set = scale_samples(train_store.samples, scaler);
    const auto val_set = scale_samples(val_store.samples, scaler);

    require_writable(out, force);
    if (!history_path.empty()) require_writable(history_path, force);

    TrainResult result = train_model(train_set, val_set, tcfg, !verbose_env());
    save_model(result.model, scaler, tcfg, out);
    {
        // scaler sidecar for inspection; the checkpoint embeds a copy
        const std::string scaler_path = out + ".scaler.json";
        std::ofstream sj(scaler_path);
        if (!sj) throw IoError("cannot write " + scaler_path);
        sj << scaler.to_json() << "\n";
    }
    if (!history_path.empty()) save_history_csv(result.history, history_path);

    const auto& best = result.history.rounds[result.history.best_round - 1];
    std::printf("trained %zu rounds (%s); best round %d val_accuracy %.4f -> %s\n",
                result.history.rounds.size(), result.history.stop_reason.c_str(),
                result.history.best_round, best.val_accuracy, out.c_str());
    return 0;
}

void require_matching_features(const Checkpoint& ckpt, const FeatureStore& store) {
    if (!(ckpt.scaler.feature_config == store.config))
        throw VersionError(
            "checkpoint was trained with different feature options than this store "
            "(checkpoint: " +
            feature_config_to_json(ckpt.scaler.feature_config) +
            ", store: " + feature_config_to_json(store.config) + ")");
}

// ---------------------------------------------------------------- eval
int cmd_eval(const std::string& model_path, const std::string& store_path,
             const std::string& out, bool force) {
    Checkpoint ckpt = load_model(model_path);
    const FeatureStore store = load_feature_store(store_path);
    require_matching_features(ckpt, store);
    if (store.samples.empty()) throw ConfigError("feature store is empty");

    const auto samples = scale_samples(store.samples, ckpt.scaler);
    const auto preds = predict(ckpt.model, samples);

    std::vector<double> scores;
    std::vector<int> hard, truth;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        scores.push_back(preds[i].p_patient);
        hard.push_back(preds[i].label);
        truth.push_back(samples[i].label);
    }
    const MetricsReport report = evaluate(scores, hard, truth);
    std::fputs(report.table().c_str(), stdout);
    if (!out.empty()) {
        require_writable(out, force);
        std::ofstream(out) << report.to_json() << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- predict
int cmd_predict(const std::string& model_path, const std::string& store_path,
                const std::string& out, bool force) {
    Checkpoint ckpt = load_model(model_path);
    const FeatureStore store = load_feature_store(store_path);
    require_matching_features(ckpt, store);

    const auto samples = scale_samples(store.samples, ckpt.scaler);
    const auto preds = predict(ckpt.model, samples);

    require_writable(out, force);
    std::ofstream csv(out);
    if (!csv) throw IoError("cannot write " + out);
    csv << "subject_id,label,p_healthy,p_patient,predicted,tie\n";
    char line[256];
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::snprintf(line, sizeof line, "%s,%d,%.17g,%.17g,%d,%d\n",
                      samples[i].subject_id.c_str(), samples[i].label,
                      preds[i].p_healthy, preds[i].p_patient, preds[i].label,
                      preds[i].tie ? 1 : 0);
        csv << line;
    }
    std::printf("wrote %zu predictions to %s\n", preds.size(), out.c_str());
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"sEMG cervical-spondylosis classification pipeline"};
    app.require_subcommand(1);

    std::string config_path, out, data_dir, split_path, model_path, store_path;
    std::string train_store, val_store, history_path, channels_text;
    bool force = false, csv = false, exhaustive = false;

    SynthConfig synth;
    FeatureConfig fcfg;
    TrainConfig tcfg;
    int samples_per_subject = 60;
    std::uint64_t assembly_seed = 0, split_seed = 0;

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic sEMG cohort");
    gen->add_option("--config", config_path, "pipeline config JSON");
    gen->add_option("--out", out, "output dataset directory")->required();
    gen->add_option("--subjects", synth.subjects_per_class, "subjects per class");
    gen->add_option("--length", synth.signal_length, "samples per recording");
    gen->add_option("--sample-rate", synth.sample_rate, "sampling rate [Hz]");
    gen->add_option("--delta", synth.delta, "class contrast in [0,1]");
    gen->add_option("--missingness", synth.missingness, "per-trial drop probability");
    gen->add_option("--seed", synth.seed, "master seed");
    gen->add_flag("--force", force, "overwrite existing outputs");

    // split
    auto* spl = app.add_subcommand("split", "subject-exclusive 3:1:1 split");
    spl->add_option("--data", data_dir, "dataset directory (with manifest.json)")->required();
    spl->add_option("--out", out, "output split JSON")->required();
    spl->add_option("--seed", split_seed, "shuffle seed");
    spl->add_flag("--force", force, "overwrite existing outputs");

    // extract
    auto* ext = app.add_subcommand("extract", "extract features into stores");
    ext->add_option("--config", config_path, "pipeline config JSON");
    ext->add_option("--data", data_dir, "dataset directory")->required();
    ext->add_option("--split", split_path, "split JSON (one store per part)");
    ext->add_option("--out", out, "output directory")->required();
    ext->add_option("--wavelet", fcfg.wavelet, "haar, db1, db2 or db4");
    ext->add_option("--dwt-padding", fcfg.dwt_padding, "symmetric|periodic");
    ext->add_flag("--rms-sqrt", fcfg.rms_sqrt,
                                "apply the square root in the rms feature");
    ext->add_option("--sample-rate", fcfg.sample_rate, "sampling rate [Hz]");
    ext->add_option("--entropy-bins", fcfg.entropy_bins, "histogram bins");
    ext->add_option("--mode-bins", fcfg.mode_bins, "mode histogram bins");
    ext->add_option("--samples-per-subject", samples_per_subject,
                    "random assembly draws per subject");
    ext->add_option("--assembly-seed", assembly_seed, "random assembly seed");
    ext->add_flag("--exhaustive", exhaustive, "walk all trial combinations");
    ext->add_flag("--csv", csv, "also export CSV mirrors");
    ext->add_flag("--force", force, "overwrite existing outputs");

    // train
    auto* trn = app.add_subcommand("train", "fit the six-channel classifier");
    trn->add_option("--config", config_path, "pipeline config JSON");
    trn->add_option("--train", train_store, "training feature store")->required();
    trn->add_option("--val", val_store, "validation feature store")->required();
    trn->add_option("--out", out, "output checkpoint path")->required();
    trn->add_option("--history", history_path, "training history CSV");
    trn->add_option("--batch-size", tcfg.batch_size, "minibatch size");
    trn->add_option("--lr", tcfg.learning_rate, "learning rate");
    trn->add_option("--max-epoch", tcfg.max_epoch, "epoch budget");
    trn->add_option("--patience", tcfg.early_stop_patience,
                    "early-stop patience (evaluation rounds)");
    trn->add_option("--alpha", tcfg.alpha, "L2 coefficient");
    trn->add_option("--seed", tcfg.seed, "training seed");
    trn->add_option("--channels", channels_text, "six 0/1 flags, e.g. 1,1,1,0,0,0");
    trn->add_option("--filter-size", tcfg.filter_size, "conv kernel size");
    trn->add_flag("--force", force, "overwrite existing outputs");

    // eval
    auto* evl = app.add_subcommand("eval", "metrics table for a feature store");
    evl->add_option("--model", model_path, "checkpoint path")->required();
    evl->add_option("--features", store_path, "feature store to score")->required();
    evl->add_option("--out", out, "metrics JSON path");
    evl->add_flag("--force", force, "overwrite existing outputs");

    // predict
    auto* prd = app.add_subcommand("predict", "per-sample probability CSV");
    prd->add_option("--model", model_path, "checkpoint path")->required();
    prd->add_option("--features", store_path, "feature store to score")->required();
    prd->add_option("--out", out, "output CSV path")->required();
    prd->add_flag("--force", force, "overwrite existing outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            std::set<std::string> cli_flags;
            for (const char* name :
                 {"subjects", "length", "sample-rate", "delta", "missingness", "seed"})
                if (gen->count(std::string("--") + name)) cli_flags.insert(name);
            return cmd_generate(config_path, out, synth, cli_flags, force);
        }
        if (spl->parsed()) return cmd_split(data_dir, out, split_seed, force);
        if (ext->parsed()) {
            std::set<std::string> cli_flags;
            for (const char* name : {"wavelet", "dwt-padding", "rms-sqrt", "sample-rate",
                                     "entropy-bins", "mode-bins"})
                if (ext->count(std::string("--") + name)) cli_flags.insert(name);
            return cmd_extract(config_path, data_dir, split_path, out, fcfg, cli_flags,
                               samples_per_subject, assembly_seed, exhaustive, csv, force);
        }
        if (trn->parsed()) {
            std::set<std::string> cli_flags;
            for (const char* name : {"batch-size", "lr", "max-epoch", "patience", "alpha",
                                     "seed", "channels", "filter-size"})
                if (trn->count(std::string("--") + name)) cli_flags.insert(name);
            if (!channels_text.empty()) tcfg.channel_mask = parse_channel_list(channels_text);
            return cmd_train(config_path, train_store, val_store, out, history_path, tcfg,
                             cli_flags, force);
        }
        if (evl->parsed()) return cmd_eval(model_path, store_path, out, force);
        if (prd->parsed()) return cmd_predict(model_path, store_path, out, force);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace emgcs::cli
