#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emgcs/recording.hpp"

namespace emgcs {

// One real value per line, UTF-8, no header.
Recording load_recording(const std::filesystem::path& path);

// Conventional file name m<i>_a<j>_t<k>.csv under <root>/<subject_id>/.
std::string recording_filename(int muscle, int movement, int trial);

struct ManifestRecording {
    int muscle = 0, movement = 0, trial = 0;
    std::string path;  // relative to the manifest directory
};

struct ManifestSubject {
    std::string subject_id;
    int label = 0;
    std::vector<ManifestRecording> recordings;
};

struct Manifest {
    std::vector<ManifestSubject> subjects;
    std::string generator_config;  // provenance blob, opaque here
};

Manifest load_manifest(const std::filesystem::path& manifest_path);
void save_manifest(const Manifest& m, const std::filesystem::path& manifest_path);

// Loads and validates one subject's recordings.
SubjectBundle load_bundle(const std::filesystem::path& root, const ManifestSubject& subject);

struct AssemblyMode {
    bool exhaustive = true;
    int count = 0;            // random mode only
    std::uint64_t seed = 0;   // random mode only

    static AssemblyMode Exhaustive() { return {true, 0, 0}; }
    static AssemblyMode Random(int count, std::uint64_t seed) { return {false, count, seed}; }
};

// Exhaustive mode walks the full cross product of per-movement trial choices;
// random mode draws `count` independent choices from the stated seed.
std::vector<SampleGrid> assemble_samples(const SubjectBundle& bundle, const AssemblyMode& mode);

// Deterministic 3:1:1 subject split, stratified by label. Validation and test
// take round(n/5) subjects each, the remainder goes to train.
DatasetSplit split_subjects(const std::vector<std::pair<std::string, int>>& subjects,
                            std::uint64_t seed);

void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

}  // namespace emgcs
