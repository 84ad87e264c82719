#include "emgcs/features.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <unordered_map>
#include <limits>

#include <omp.h>

#include "emgcs/ar.hpp"
#include "emgcs/errors.hpp"
#include "emgcs/wavelet.hpp"

namespace emgcs {

namespace {

void check_signal(std::span<const double> x, const char* what) {
    if (x.size() < 2)
        throw TooShortError(std::string(what) + ": need at least 2 samples, got " +
                            std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidSignalError(std::string(what) + ": non-finite sample");
}

}  // namespace

std::array<double, 11> time_features(std::span<const double> x, const FeatureConfig& cfg) {
    check_signal(x, "time_features");
    const int n = static_cast<int>(x.size());

    double mean = 0.0, vmax = x[0], vmin = x[0], sq = 0.0;
    for (double v : x) {
        mean += v;
        vmax = std::max(vmax, v);
        vmin = std::min(vmin, v);
        sq += v * v;
    }
    mean /= n;

    double var = 0.0, iemg = 0.0;
    for (double v : x) {
        const double d = v - mean;
        var += d * d;
        iemg += std::abs(d);
    }
    var /= n;
    const double sd = std::sqrt(var);
    const double range = vmax - vmin;
    const double aemg = iemg / n;
    double rms = sq / n;
    if (cfg.rms_sqrt) rms = std::sqrt(rms);

    // most populated of mode_bins equal-width bins, lowest index on ties
    double mode = vmin;
    if (range > 0.0) {
        std::vector<int> counts(cfg.mode_bins, 0);
        const double w = range / cfg.mode_bins;
        for (double v : x) {
            int idx = static_cast<int>((v - vmin) / w);
            idx = std::clamp(idx, 0, cfg.mode_bins - 1);
            ++counts[idx];
        }
        const int best =
            static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        mode = vmin + (best + 0.5) * w;
    }

    // mean-crossing count
    double over_zero = 0.0;
    for (int i = 0; i + 1 < n; ++i)
        if ((x[i] - mean) * (x[i + 1] - mean) < 0.0) over_zero += 1.0;

    return {mean, var, sd, mode, vmax, vmin, over_zero, range, aemg, iemg, rms};
}

std::array<double, 14> freq_features(const Spectrum& spectrum, double sample_rate,
                                     bool* degenerate) {
    const auto& x = spectrum.one_sided;
    const int a = static_cast<int>(x.size());
    if (a == 0) throw InvalidSignalError("freq_features: empty spectrum");
    const int n = spectrum.signal_length;

    bool flagged = false;
    double sum = 0.0, power = 0.0;
    for (double v : x) {
        sum += v;
        power += v * v;
    }

    std::array<double, 14> out{};
    const double dc = x[0];
    out[0] = dc;

    double mean = sum / a;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= a;
    const double sd = std::sqrt(var);

    double skew = 0.0, kurt = 0.0;
    if (sd > 0.0) {
        for (double v : x) {
            const double z = (v - mean) / sd;
            skew += z * z * z;
            kurt += z * z * z * z;
        }
        skew /= a;
        kurt = kurt / a - 3.0;
    } else {
        flagged = true;
    }

    double entropy = 0.0, s_mean = 0.0, s_std = 0.0, s_var = 0.0, s_skew = 0.0, s_kurt = 0.0;
    double mf = 0.0, mpf = 0.0;
    if (sum > 0.0) {
        for (int i = 0; i < a; ++i) {
            const double q = x[i] / sum;
            if (q > 0.0) entropy -= q * std::log(q);
            s_mean += i * x[i];
        }
        s_mean /= sum;
        for (int i = 0; i < a; ++i) s_var += (i - s_mean) * (i - s_mean) * x[i];
        s_var /= sum;
        s_std = std::sqrt(s_var);
        if (s_std > 0.0) {
            for (int i = 0; i < a; ++i) {
                const double z = (i - s_mean) / s_std;
                s_skew += z * z * z * x[i];
                s_kurt += z * z * z * z * x[i];
            }
            s_skew /= sum;
            s_kurt = s_kurt / sum - 3.0;
        }

        // median frequency: first bin where cumulative power reaches half
        const double half = power / 2.0;
        double cum = 0.0;
        int m = a - 1;
        for (int i = 0; i < a; ++i) {
            cum += x[i] * x[i];
            if (cum >= half) {
                m = i;
                break;
            }
        }
        const double df = sample_rate / n;
        mf = m * df;
        double pw = 0.0;
        for (int i = 0; i < a; ++i) pw += i * df * x[i] * x[i];
        mpf = power > 0.0 ? pw / power : 0.0;
    } else {
        flagged = true;
    }

    out[1] = mean;
    out[2] = var;
    out[3] = sd;
    out[4] = skew;
    out[5] = kurt;
    out[6] = entropy;
    out[7] = s_mean;
    out[8] = s_std;
    out[9] = s_var;
    out[10] = s_skew;
    out[11] = s_kurt;
    out[12] = mf;
    out[13] = mpf;
    if (degenerate) *degenerate = flagged;
    return out;
}

CoeffStats coeff_stats(std::span<const double> coeffs, double log_floor) {
    const double eps = std::pow(10.0, log_floor);
    double sumsq = 0.0;
    double best = 0.0;
    for (double v : coeffs) {
        sumsq += v * v;
        if (v > best) best = v;
    }
    CoeffStats s;
    s.c_max = best > eps ? std::log10(best) : log_floor;
    s.singular_value = std::sqrt(sumsq);
    const double e = coeffs.empty() ? 0.0 : s.singular_value / coeffs.size();
    s.c_energy = e > eps ? std::log10(e) : log_floor;
    return s;
}

std::array<double, 15> dwt_features(std::span<const double> x, const FeatureConfig& cfg) {
    check_signal(x, "dwt_features");
    const WaveletTree tree = wavedec(x, cfg.wavelet, 5, padding_from_name(cfg.dwt_padding));

    std::array<double, 15> out{};
    // approximation at level 5, then details at levels 5,4,3,2
    const std::vector<double>* sets[5] = {&tree.approximation, &tree.details[4],
                                          &tree.details[3], &tree.details[2],
                                          &tree.details[1]};
    for (int s = 0; s < 5; ++s) {
        const CoeffStats cs = coeff_stats(*sets[s], cfg.log_floor);
        out[s * 3 + 0] = cs.c_max;
        out[s * 3 + 1] = cs.singular_value;
        out[s * 3 + 2] = cs.c_energy;
    }
    return out;
}

std::array<double, 8> wpd_features(std::span<const double> x, const FeatureConfig& cfg) {
    check_signal(x, "wpd_features");
    const auto subbands = wpd_subbands(x, cfg.wavelet, 3);
    const double eps = std::pow(10.0, cfg.log_floor);

    std::array<double, 8> out{};
    for (int s = 0; s < 8; ++s) {
        double sumsq = 0.0;
        for (double v : subbands[s]) sumsq += v * v;
        const double e = std::sqrt(sumsq) / subbands[s].size();
        out[s] = e > eps ? std::log10(e) : cfg.log_floor;
    }
    return out;
}

std::array<double, 14> ar_features(std::span<const double> x) {
    if (x.size() <= 20)
        throw TooShortError("ar_features: need more than 20 samples, got " +
                            std::to_string(x.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidSignalError("ar_features: non-finite sample");

    const ARFit f10 = fit_ar(x, 10);
    const ARFit f4 = fit_ar(x, 4);
    std::array<double, 14> out{};
    for (int i = 0; i < 10; ++i) out[i] = f10.coefficients[i];
    for (int i = 0; i < 4; ++i) out[10 + i] = f4.coefficients[i];
    return out;
}

double entropy_feature(std::span<const double> x, int bins) {
    check_signal(x, "entropy_feature");
    double vmin = x[0], vmax = x[0];
    for (double v : x) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax == vmin) return 0.0;

    std::vector<int> counts(bins, 0);
    const double w = (vmax - vmin) / bins;
    for (double v : x) {
        int idx = static_cast<int>((v - vmin) / w);
        idx = std::clamp(idx, 0, bins - 1);
        ++counts[idx];
    }
    const double n = static_cast<double>(x.size());
    double h = 0.0;
    for (int c : counts) {
        if (c == 0) continue;
        const double p = c / n;
        h -= p * std::log(p);
    }
    return h;
}

FeatureSample::FeatureSample() {
    for (int k = 0; k < 6; ++k) {
        values[k].assign(static_cast<std::size_t>(kCells) * kFamilyDepth[k], 0.0);
        present[k].fill(false);
    }
}

namespace {

// per-recording results of all six extractors
struct CellFeatures {
    std::array<std::vector<double>, 6> values;
    std::array<bool, 6> ok{};
};

CellFeatures extract_cell(const Recording& rec, const FeatureConfig& cfg) {
    const std::span<const double> sig(rec.samples);
    CellFeatures out;

    auto store = [&](int family, const double* vals) {
        out.values[family].assign(vals, vals + kFamilyDepth[family]);
        out.ok[family] = true;
    };
    try {
        const auto tf = time_features(sig, cfg);
        store(0, tf.data());
    } catch (const Error&) {}
    try {
        const Spectrum spec = dft_spectrum(sig);
        const auto ff = freq_features(spec, cfg.sample_rate);
        store(1, ff.data());
    } catch (const Error&) {}
    try {
        const auto wt = dwt_features(sig, cfg);
        store(2, wt.data());
    } catch (const Error&) {}
    try {
        const auto wp = wpd_features(sig, cfg);
        store(3, wp.data());
    } catch (const Error&) {}
    try {
        const auto ar = ar_features(sig);
        store(4, ar.data());
    } catch (const Error&) {}
    try {
        const double h = entropy_feature(sig, cfg.entropy_bins);
        store(5, &h);
    } catch (const Error&) {}
    return out;
}

FeatureSample assemble_features(const SampleGrid& grid,
                                const std::array<const CellFeatures*, kCells>& cells) {
    FeatureSample fs;
    fs.label = grid.label;
    fs.subject_id = grid.subject_id;

    int missing_cells = 0;
    for (int cell = 0; cell < kCells; ++cell) {
        const CellFeatures* cf = cells[cell];
        if (!cf) {
            ++missing_cells;
            continue;
        }
        bool any = false;
        for (int k = 0; k < 6; ++k) {
            if (!cf->ok[k]) continue;
            const int d = kFamilyDepth[k];
            std::copy(cf->values[k].begin(), cf->values[k].end(),
                      fs.values[k].begin() + cell * d);
            fs.present[k][cell] = true;
            any = true;
        }
        if (!any) ++missing_cells;
    }
    if (missing_cells * 2 > kCells)
        throw UnusableSampleError("sample of subject " + grid.subject_id + ": " +
                                  std::to_string(missing_cells) + " of " +
                                  std::to_string(kCells) + " cells missing");
    return fs;
}

}  // namespace

FeatureSample extract_sample(const SampleGrid& grid, const FeatureConfig& cfg) {
    std::array<CellFeatures, kCells> storage;
    std::array<const CellFeatures*, kCells> cells{};
    for (int cell = 0; cell < kCells; ++cell) {
        const Recording* rec = grid.cells[cell].get();
        if (!rec) continue;
        storage[cell] = extract_cell(*rec, cfg);
        cells[cell] = &storage[cell];
    }
    return assemble_features(grid, cells);
}

std::vector<FeatureSample> extract_samples(const std::vector<SampleGrid>& grids,
                                           const FeatureConfig& cfg, int* rejected) {
    // Grids of one subject share their recordings, so extract each distinct
    // recording once and assemble samples from the cache.
    std::vector<const Recording*> unique;
    std::unordered_map<const Recording*, std::size_t> index;
    for (const auto& g : grids)
        for (const auto& cell : g.cells)
            if (cell && index.emplace(cell.get(), unique.size()).second)
                unique.push_back(cell.get());

    std::vector<CellFeatures> cache(unique.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < static_cast<long>(unique.size()); ++i)
        cache[i] = extract_cell(*unique[i], cfg);

    std::vector<FeatureSample> out;
    out.reserve(grids.size());
    int nrej = 0;
    for (const auto& g : grids) {
        std::array<const CellFeatures*, kCells> cells{};
        for (int cell = 0; cell < kCells; ++cell)
            if (g.cells[cell]) cells[cell] = &cache[index.at(g.cells[cell].get())];
        try {
            out.push_back(assemble_features(g, cells));
        } catch (const UnusableSampleError&) {
            ++nrej;
        }
    }
    if (rejected) *rejected = nrej;
    return out;
}

int feature_flat_index(int family, int muscle, int movement, int feature) {
    static const std::array<int, 6> offsets = [] {
        std::array<int, 6> o{};
        int acc = 0;
        for (int k = 0; k < 6; ++k) {
            o[k] = acc;
            acc += kCells * kFamilyDepth[k];
        }
        return o;
    }();
    return offsets[family] + (muscle * kMovements + movement) * kFamilyDepth[family] + feature;
}

const std::array<std::string, 6>& family_names() {
    static const std::array<std::string, 6> names = {"tf", "ff", "wt", "wp", "ar", "ent"};
    return names;
}

const std::vector<std::string>& feature_names(int family) {
    static const std::array<std::vector<std::string>, 6> names = [] {
        std::array<std::vector<std::string>, 6> n;
        n[0] = {"mean", "var",       "std",   "mode", "max", "min",
                "over_zero", "range", "aemg", "iemg", "rms"};
        n[1] = {"dc",     "mean",  "var",   "std",    "skew",   "kurt",  "entropy",
                "s_mean", "s_std", "s_var", "s_skew", "s_kurt", "mf",    "mpf"};
        for (const char* set : {"ch", "d5", "d4", "d3", "d2"})
            for (const char* stat : {"cmax", "sv", "cenergy"})
                n[2].push_back(std::string(set) + "_" + stat);
        for (int s = 0; s < 8; ++s) n[3].push_back("sb" + std::to_string(s));
        for (int i = 1; i <= 10; ++i) n[4].push_back("p10_" + std::to_string(i));
        for (int i = 1; i <= 4; ++i) n[4].push_back("p4_" + std::to_string(i));
        n[5] = {"entropy"};
        return n;
    }();
    return names[family];
}

std::vector<std::string> all_column_names() {
    std::vector<std::string> cols;
    cols.reserve(kTotalFeatures);
    for (int k = 0; k < 6; ++k)
        for (int i = 0; i < kMuscles; ++i)
            for (int j = 0; j < kMovements; ++j)
                for (const auto& f : feature_names(k))
                    cols.push_back(family_names()[k] + "_m" + std::to_string(i) + "_a" +
                                   std::to_string(j) + "_" + f);
    return cols;
}

void flatten_sample(const FeatureSample& fs, std::vector<double>& values,
                    std::vector<bool>& present) {
    values.assign(kTotalFeatures, std::numeric_limits<double>::quiet_NaN());
    present.assign(kTotalFeatures, false);
    int idx = 0;
    for (int k = 0; k < 6; ++k) {
        const int d = kFamilyDepth[k];
        for (int cell = 0; cell < kCells; ++cell) {
            const bool here = fs.present[k][cell];
            for (int f = 0; f < d; ++f, ++idx) {
                if (here) {
                    values[idx] = fs.values[k][cell * d + f];
                    present[idx] = true;
                }
            }
        }
    }
}

}  // namespace emgcs
