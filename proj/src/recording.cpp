#include "emgcs/recording.hpp"

#include <cmath>
#include <string>

#include "emgcs/errors.hpp"

namespace emgcs {

void SubjectBundle::put(Recording r) {
    if (r.muscle < 0 || r.muscle >= kMuscles || r.movement < 0 || r.movement >= kMovements ||
        r.trial < 0 || r.trial >= kTrials)
        throw Error("recording index out of range: muscle " + std::to_string(r.muscle) +
                    ", movement " + std::to_string(r.movement) + ", trial " +
                    std::to_string(r.trial));
    recordings[slot(r.muscle, r.movement, r.trial)] =
        std::make_shared<const Recording>(std::move(r));
}

std::vector<int> SubjectBundle::movement_trials(int movement) const {
    std::vector<int> trials;
    for (int k = 0; k < kTrials; ++k) {
        for (int i = 0; i < kMuscles; ++i) {
            if (get(i, movement, k)) {
                trials.push_back(k);
                break;
            }
        }
    }
    return trials;
}

int SubjectBundle::recording_count() const {
    int c = 0;
    for (const auto& r : recordings)
        if (r) ++c;
    return c;
}

void SubjectBundle::validate() const {
    for (const auto& r : recordings) {
        if (!r) continue;
        if (r->samples.empty())
            throw InvalidSignalError("bundle " + subject_id + ": empty recording m" +
                                     std::to_string(r->muscle) + "_a" +
                                     std::to_string(r->movement) + "_t" +
                                     std::to_string(r->trial));
        for (double v : r->samples)
            if (!std::isfinite(v))
                throw InvalidSignalError("bundle " + subject_id + ": non-finite sample in m" +
                                         std::to_string(r->muscle) + "_a" +
                                         std::to_string(r->movement) + "_t" +
                                         std::to_string(r->trial));
    }
    if (label != 0 && label != 1)
        throw Error("bundle " + subject_id + ": label must be 0 or 1");

    for (int j = 0; j < kMovements; ++j) {
        bool movement_present = false;
        for (int i = 0; i < kMuscles && !movement_present; ++i)
            for (int k = 0; k < kTrials && !movement_present; ++k)
                if (get(i, j, k)) movement_present = true;
        if (!movement_present) continue;
        for (int i = 0; i < kMuscles; ++i) {
            bool has_trial = false;
            for (int k = 0; k < kTrials; ++k)
                if (get(i, j, k)) has_trial = true;
            if (!has_trial)
                throw IncompleteBundleError("bundle " + subject_id + ": movement " +
                                            std::to_string(j) + " has no trial for muscle " +
                                            std::to_string(i));
        }
    }
}

int SampleGrid::filled_count() const {
    int c = 0;
    for (const auto& p : cells)
        if (p) ++c;
    return c;
}

}  // namespace emgcs
