#include "emgcs/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "emgcs/errors.hpp"
#include "emgcs/rng.hpp"

namespace emgcs {

using nlohmann::json;

Recording load_recording(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open signal file " + path.string());

    Recording rec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // tolerate CRLF and surrounding blanks
        std::string_view sv(line);
        while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ' || sv.back() == '\t'))
            sv.remove_suffix(1);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        if (sv.empty())
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty row");
        double v = 0.0;
        const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
            throw ParseError(path.string() + ":" + std::to_string(lineno) +
                             ": malformed value '" + std::string(sv) + "'");
        if (!std::isfinite(v))
            throw InvalidSignalError(path.string() + ":" + std::to_string(lineno) +
                                     ": non-finite value");
        rec.samples.push_back(v);
    }
    if (rec.samples.empty())
        throw InvalidSignalError(path.string() + ": empty signal (no data rows)");
    return rec;
}

std::string recording_filename(int muscle, int movement, int trial) {
    return "m" + std::to_string(muscle) + "_a" + std::to_string(movement) + "_t" +
           std::to_string(trial) + ".csv";
}

Manifest load_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest " + manifest_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("manifest " + manifest_path.string() + ": " + e.what());
    }

    Manifest m;
    if (j.contains("generator_config")) m.generator_config = j["generator_config"].dump();
    for (const auto& js : j.at("subjects")) {
        ManifestSubject s;
        s.subject_id = js.at("subject_id").get<std::string>();
        s.label = js.at("label").get<int>();
        for (const auto& jr : js.at("recordings")) {
            ManifestRecording r;
            r.muscle = jr.at("muscle").get<int>();
            r.movement = jr.at("movement").get<int>();
            r.trial = jr.at("trial").get<int>();
            r.path = jr.at("path").get<std::string>();
            s.recordings.push_back(std::move(r));
        }
        m.subjects.push_back(std::move(s));
    }
    return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& manifest_path) {
    json j;
    j["schema_version"] = 1;
    if (!m.generator_config.empty())
        j["generator_config"] = json::parse(m.generator_config);
    j["subjects"] = json::array();
    for (const auto& s : m.subjects) {
        json js;
        js["subject_id"] = s.subject_id;
        js["label"] = s.label;
        js["recordings"] = json::array();
        for (const auto& r : s.recordings)
            js["recordings"].push_back(
                {{"muscle", r.muscle}, {"movement", r.movement}, {"trial", r.trial},
                 {"path", r.path}});
        j["subjects"].push_back(std::move(js));
    }
    std::ofstream out(manifest_path);
    if (!out) throw IoError("cannot write manifest " + manifest_path.string());
    out << j.dump(2) << "\n";
}

SubjectBundle load_bundle(const std::filesystem::path& root, const ManifestSubject& subject) {
    SubjectBundle bundle;
    bundle.subject_id = subject.subject_id;
    bundle.label = subject.label;
    for (const auto& mr : subject.recordings) {
        Recording rec = load_recording(root / mr.path);
        rec.subject_id = subject.subject_id;
        rec.muscle = mr.muscle;
        rec.movement = mr.movement;
        rec.trial = mr.trial;
        bundle.put(std::move(rec));
    }
    bundle.validate();
    return bundle;
}

std::vector<SampleGrid> assemble_samples(const SubjectBundle& bundle, const AssemblyMode& mode) {
    bundle.validate();

    std::array<std::vector<int>, kMovements> trials;
    for (int j = 0; j < kMovements; ++j) {
        trials[j] = bundle.movement_trials(j);
        if (trials[j].empty())
            throw IncompleteBundleError("bundle " + bundle.subject_id + ": movement " +
                                        std::to_string(j) + " has no trials");
    }

    auto make_grid = [&](const std::array<int, kMovements>& choice) {
        SampleGrid g;
        g.subject_id = bundle.subject_id;
        g.label = bundle.label;
        g.trial_choice = choice;
        for (int i = 0; i < kMuscles; ++i)
            for (int j = 0; j < kMovements; ++j)
                g.cells[i * kMovements + j] = bundle.get_shared(i, j, choice[j]);
        return g;
    };

    std::vector<SampleGrid> out;
    if (mode.exhaustive) {
        std::size_t total = 1;
        for (int j = 0; j < kMovements; ++j) total *= trials[j].size();
        out.reserve(total);
        std::array<int, kMovements> idx{};
        for (std::size_t s = 0; s < total; ++s) {
            std::array<int, kMovements> choice;
            for (int j = 0; j < kMovements; ++j) choice[j] = trials[j][idx[j]];
            out.push_back(make_grid(choice));
            for (int j = kMovements - 1; j >= 0; --j) {
                if (++idx[j] < static_cast<int>(trials[j].size())) break;
                idx[j] = 0;
            }
        }
    } else {
        if (mode.count <= 0) throw ConfigError("random assembly needs a positive count");
        Rng rng(mode.seed);
        out.reserve(mode.count);
        for (int s = 0; s < mode.count; ++s) {
            std::array<int, kMovements> choice;
            for (int j = 0; j < kMovements; ++j) {
                std::uniform_int_distribution<int> pick(0,
                                                        static_cast<int>(trials[j].size()) - 1);
                choice[j] = trials[j][pick(rng)];
            }
            out.push_back(make_grid(choice));
        }
    }
    return out;
}

DatasetSplit split_subjects(const std::vector<std::pair<std::string, int>>& subjects,
                            std::uint64_t seed) {
    const int n = static_cast<int>(subjects.size());
    if (n < 5)
        throw InsufficientSubjectsError("split needs at least 5 subjects, got " +
                                        std::to_string(n));

    const int n_val = static_cast<int>(std::llround(n / 5.0));
    const int n_test = n_val;

    // per-class shuffled id lists
    std::array<std::vector<std::string>, 2> by_class;
    for (const auto& [id, label] : subjects) {
        if (label != 0 && label != 1) throw Error("subject " + id + ": label must be 0 or 1");
        by_class[label].push_back(id);
    }
    for (int c = 0; c < 2; ++c) {
        Rng rng(mix_seed(seed, 0x5eedULL, static_cast<std::uint64_t>(c)));
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
    }

    // class counts for validation and test via largest remainder
    auto allocate = [&](int part_size) {
        std::array<int, 2> alloc{};
        std::array<double, 2> frac{};
        int assigned = 0;
        for (int c = 0; c < 2; ++c) {
            const double quota =
                static_cast<double>(by_class[c].size()) * part_size / static_cast<double>(n);
            alloc[c] = static_cast<int>(quota);
            frac[c] = quota - alloc[c];
            assigned += alloc[c];
        }
        while (assigned < part_size) {
            int best = frac[0] >= frac[1] ? 0 : 1;
            ++alloc[best];
            frac[best] = -1.0;
            ++assigned;
        }
        return alloc;
    };

    std::array<int, 2> val_c = allocate(n_val);
    std::array<int, 2> test_c = allocate(n_test);

    // parts[p][c] = ids of class c assigned to part p (0 train, 1 val, 2 test)
    std::array<std::array<std::vector<std::string>, 2>, 3> parts;
    for (int c = 0; c < 2; ++c) {
        const auto& ids = by_class[c];
        const int nc = static_cast<int>(ids.size());
        int train_cnt = nc - val_c[c] - test_c[c];
        if (train_cnt < 0)
            throw Error("split allocation underflow for class " + std::to_string(c));
        int pos = 0;
        for (int t = 0; t < train_cnt; ++t) parts[0][c].push_back(ids[pos++]);
        for (int t = 0; t < val_c[c]; ++t) parts[1][c].push_back(ids[pos++]);
        for (int t = 0; t < test_c[c]; ++t) parts[2][c].push_back(ids[pos++]);
    }

    // Keep both classes in every part when the class has enough subjects.
    for (int pass = 0; pass < 4; ++pass) {
        bool changed = false;
        for (int p = 0; p < 3; ++p) {
            for (int c = 0; c < 2; ++c) {
                if (!parts[p][c].empty() || by_class[c].size() < 3) continue;
                // donor: part with the most of class c (needs at least 2)
                int donor = -1;
                for (int q = 0; q < 3; ++q)
                    if (q != p && parts[q][c].size() >= 2 &&
                        (donor < 0 || parts[q][c].size() > parts[donor][c].size()))
                        donor = q;
                const int other = 1 - c;
                if (donor < 0 || parts[p][other].empty()) continue;
                parts[p][c].push_back(parts[donor][c].back());
                parts[donor][c].pop_back();
                parts[donor][other].push_back(parts[p][other].back());
                parts[p][other].pop_back();
                changed = true;
            }
        }
        if (!changed) break;
    }

    DatasetSplit split;
    split.seed = seed;
    auto flatten = [](const std::array<std::vector<std::string>, 2>& part) {
        std::vector<std::string> ids;
        for (const auto& v : part) ids.insert(ids.end(), v.begin(), v.end());
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    split.train = flatten(parts[0]);
    split.validation = flatten(parts[1]);
    split.test = flatten(parts[2]);
    return split;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
    json j;
    j["schema_version"] = 1;
    j["seed"] = split.seed;
    j["train"] = split.train;
    j["validation"] = split.validation;
    j["test"] = split.test;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write split file " + path.string());
    out << j.dump(2) << "\n";
}

DatasetSplit load_split(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open split file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("split file " + path.string() + ": " + e.what());
    }
    DatasetSplit split;
    split.seed = j.value("seed", 0ULL);
    split.train = j.at("train").get<std::vector<std::string>>();
    split.validation = j.at("validation").get<std::vector<std::string>>();
    split.test = j.at("test").get<std::vector<std::string>>();
    return split;
}

}  // namespace emgcs
