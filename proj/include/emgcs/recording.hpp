#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace emgcs {

inline constexpr int kMuscles = 6;
inline constexpr int kMovements = 7;
inline constexpr int kTrials = 3;
inline constexpr int kCells = kMuscles * kMovements;  // 42

// One muscle/movement/trial voltage sequence.
struct Recording {
    std::string subject_id;
    int muscle = 0;    // 0..5
    int movement = 0;  // 0..6
    int trial = 0;     // 0..2
    std::vector<double> samples;
};

// All recordings of one subject. Missing trials are simply absent entries.
struct SubjectBundle {
    std::string subject_id;
    int label = 0;  // 0 healthy, 1 patient
    std::array<std::shared_ptr<const Recording>, kMuscles * kMovements * kTrials> recordings{};

    static int slot(int muscle, int movement, int trial) {
        return (muscle * kMovements + movement) * kTrials + trial;
    }

    const Recording* get(int muscle, int movement, int trial) const {
        return recordings[slot(muscle, movement, trial)].get();
    }

    std::shared_ptr<const Recording> get_shared(int muscle, int movement, int trial) const {
        return recordings[slot(muscle, movement, trial)];
    }

    void put(Recording r);

    // Trials available for a movement: union over muscles.
    std::vector<int> movement_trials(int movement) const;

    int recording_count() const;

    // Enforces index ranges and "every movement has at least one trial for
    // every muscle"; throws IncompleteBundleError / InvalidSignalError.
    void validate() const;
};

// One assembled sample: 6x7 grid of recording references, one trial index per
// movement column. Cells may be absent when the chosen trial is missing for a
// muscle; downstream extraction masks them.
struct SampleGrid {
    std::array<std::shared_ptr<const Recording>, kCells> cells{};  // [muscle*7+movement]
    std::array<int, kMovements> trial_choice{};
    int label = 0;
    std::string subject_id;

    const Recording* cell(int muscle, int movement) const {
        return cells[muscle * kMovements + movement].get();
    }

    int filled_count() const;
};

struct DatasetSplit {
    std::vector<std::string> train, validation, test;
    std::uint64_t seed = 0;
};

}  // namespace emgcs
