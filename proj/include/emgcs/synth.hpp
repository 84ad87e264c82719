#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "emgcs/dataset.hpp"
#include "emgcs/recording.hpp"

namespace emgcs {

// Class-separable synthetic cohorts. Signals are AR(2)-driven noise whose
// pole angle (spectral peak), pole radius and amplitude depend on
// (label, muscle, movement); delta scales the label contrast and delta = 0
// makes the two classes identically distributed.
struct SynthConfig {
    int subjects_per_class = 20;
    int signal_length = 4096;
    double sample_rate = 1000.0;
    double delta = 1.0;        // class contrast in [0,1]
    double missingness = 0.0;  // per-trial drop probability
    std::uint64_t seed = 0;

    void validate() const;
    std::string to_json() const;
    static SynthConfig from_json(const std::string& text);
};

SubjectBundle generate_subject(int label, const SynthConfig& config,
                               std::uint64_t subject_seed);

std::uint64_t subject_seed_for(const SynthConfig& config, int label, int index);

// Writes <out>/<subject_id>/m<i>_a<j>_t<k>.csv for every kept trial plus
// manifest.json carrying the config for provenance.
Manifest generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

}  // namespace emgcs
