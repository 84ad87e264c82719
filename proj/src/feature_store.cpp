#include "emgcs/feature_store.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "emgcs/checkpoint.hpp"
#include "emgcs/container.hpp"
#include "emgcs/errors.hpp"

namespace emgcs {

using nlohmann::json;

namespace {
constexpr char kMagic[8] = {'E', 'M', 'G', 'C', 'S', 'F', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr int kMaskValues = 6 * kCells;  // per-family per-cell presence
}  // namespace

void save_feature_store(const FeatureStore& store, const std::filesystem::path& path) {
    json header;
    header["kind"] = "feature_store";
    header["feature_config"] = json::parse(feature_config_to_json(store.config));
    header["rows"] = store.samples.size();
    json ids = json::array(), labels = json::array();
    for (const auto& s : store.samples) {
        ids.push_back(s.subject_id);
        labels.push_back(s.label);
    }
    header["subject_ids"] = std::move(ids);
    header["labels"] = std::move(labels);

    std::vector<double> blob;
    blob.reserve(store.samples.size() * (kTotalFeatures + kMaskValues));
    for (const auto& s : store.samples) {
        for (int k = 0; k < 6; ++k)
            blob.insert(blob.end(), s.values[k].begin(), s.values[k].end());
        for (int k = 0; k < 6; ++k)
            for (int cell = 0; cell < kCells; ++cell)
                blob.push_back(s.present[k][cell] ? 1.0 : 0.0);
    }
    container::write_file(path, kMagic, kVersion, header.dump(), blob);
}

FeatureStore load_feature_store(const std::filesystem::path& path) {
    const auto loaded = container::read_file(path, kMagic, kVersion);
    json header;
    try {
        header = json::parse(loaded.header_json);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": bad store header: " + e.what());
    }
    if (header.value("kind", "") != "feature_store")
        throw ParseError(path.string() + ": not a feature store");

    FeatureStore store;
    store.config = feature_config_from_json(header.at("feature_config").dump());
    const std::size_t rows = header.at("rows").get<std::size_t>();
    const auto ids = header.at("subject_ids").get<std::vector<std::string>>();
    const auto labels = header.at("labels").get<std::vector<int>>();
    if (ids.size() != rows || labels.size() != rows)
        throw ParseError(path.string() + ": header row counts disagree");
    const std::size_t per_row = kTotalFeatures + kMaskValues;
    if (loaded.blob.size() != rows * per_row)
        throw ChecksumError(path.string() + ": blob size does not match row count");

    store.samples.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        FeatureSample& s = store.samples[r];
        s.subject_id = ids[r];
        s.label = labels[r];
        std::size_t off = r * per_row;
        for (int k = 0; k < 6; ++k) {
            std::copy(loaded.blob.begin() + off,
                      loaded.blob.begin() + off + s.values[k].size(), s.values[k].begin());
            off += s.values[k].size();
        }
        for (int k = 0; k < 6; ++k)
            for (int cell = 0; cell < kCells; ++cell)
                s.present[k][cell] = loaded.blob[off++] != 0.0;
    }
    return store;
}

void export_feature_csv(const FeatureStore& store, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const auto cols = all_column_names();
    out << "subject_id,label";
    for (const auto& c : cols) out << "," << c;
    for (const auto& c : cols) out << ",mask_" << c;
    out << "\n";

    std::vector<double> flat;
    std::vector<bool> present;
    char buf[40];
    for (const auto& s : store.samples) {
        flatten_sample(s, flat, present);
        out << s.subject_id << "," << s.label;
        for (int i = 0; i < kTotalFeatures; ++i) {
            if (present[i]) {
                std::snprintf(buf, sizeof buf, ",%.17g", flat[i]);
                out << buf;
            } else {
                out << ",";  // empty field for a missing value
            }
        }
        for (int i = 0; i < kTotalFeatures; ++i) out << (present[i] ? ",1" : ",0");
        out << "\n";
    }
}

}  // namespace emgcs
