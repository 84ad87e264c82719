// Acceptance suite: runs each numbered criterion and prints one PASS/FAIL
// line. With no arguments all criteria run; `acceptance 3 7` runs a subset.
//
// Criterion 6 trains the full-size network on the full synthetic cohort six
// times, which takes hours of CPU time; by default it measures one epoch,
// projects the total and reports honestly against the 15-minute budget.
// Set EMGCS_ACCEPT_FULL=1 to run it to completion.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "emgcs/ar.hpp"
#include "emgcs/checkpoint.hpp"
#include "emgcs/dataset.hpp"
#include "emgcs/dft.hpp"
#include "emgcs/features.hpp"
#include "emgcs/metrics.hpp"
#include "emgcs/model.hpp"
#include "emgcs/rng.hpp"
#include "emgcs/synth.hpp"
#include "emgcs/train.hpp"
#include "emgcs/wavelet.hpp"

using namespace emgcs;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

#define EXPECT(cond, msg)                          \
    do {                                           \
        if (!(cond)) return {false, (msg)};        \
    } while (0)

// ------------------------------------------------------------------ helpers

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

std::vector<std::complex<double>> brute_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> X(n);
    for (std::size_t m = 0; m < n; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = -2.0 * std::numbers::pi * double(m) * double(t) / double(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        X[m] = acc;
    }
    return X;
}

std::vector<double> yule_walker_direct(const std::vector<double>& r, int order) {
    std::vector<std::vector<double>> A(order, std::vector<double>(order + 1, 0.0));
    for (int i = 0; i < order; ++i) {
        for (int j = 0; j < order; ++j) A[i][j] = r[std::abs(i - j)];
        A[i][order] = r[i + 1];
    }
    for (int col = 0; col < order; ++col) {
        int piv = col;
        for (int row = col + 1; row < order; ++row)
            if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
        std::swap(A[col], A[piv]);
        for (int row = col + 1; row < order; ++row) {
            const double f = A[row][col] / A[col][col];
            for (int j = col; j <= order; ++j) A[row][j] -= f * A[col][j];
        }
    }
    std::vector<double> phi(order);
    for (int row = order - 1; row >= 0; --row) {
        double s = A[row][order];
        for (int j = row + 1; j < order; ++j) s -= A[row][j] * phi[j];
        phi[row] = s / A[row][row];
    }
    return phi;
}

std::vector<double> ar2_signal(double phi1, double phi2, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(n + 512);
    for (std::size_t t = 2; t < x.size(); ++t)
        x[t] = phi1 * x[t - 1] + phi2 * x[t - 2] + g(rng);
    return {x.begin() + 512, x.end()};
}

// ------------------------------------------------- criterion 1: numerics

Outcome criterion1() {
    // DFT vs brute force, lengths <= 256 including non-powers of two
    for (std::size_t n : {2u, 3u, 7u, 16u, 31u, 64u, 100u, 127u, 128u, 255u, 256u}) {
        const auto x = random_signal(n, 11 * n);
        const auto want = brute_dft(x);
        const Spectrum got = dft_spectrum(x);
        for (std::size_t m = 0; m < n; ++m)
            EXPECT(std::abs(got.coefficients[m] - want[m]) <= 1e-9,
                   "dft differs from brute force at n=" + std::to_string(n));
    }

    // Parseval
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t n = 16 + rng() % 1009;
        const auto x = random_signal(n, 300 + rep);
        const Spectrum s = dft_spectrum(x);
        double te = 0.0, fe = 0.0;
        for (double v : x) te += v * v;
        for (const auto& c : s.coefficients) fe += std::norm(c);
        fe /= double(n);
        EXPECT(std::abs(te - fe) <= 1e-9 * std::max(1.0, te), "Parseval identity violated");
    }

    // DWT reconstruction
    for (const char* w : {"haar", "db2", "db4"})
        for (Padding mode : {Padding::Symmetric, Padding::Periodic})
            for (std::size_t n : {224u, 300u, 512u, 1000u}) {
                const auto x = random_signal(n, n + 5);
                const WaveletFilters f = wavelet_filters(w);
                int levels = 1;
                while (levels < 5 && int(n) >= min_length_for_levels(f, levels + 1)) ++levels;
                const auto rec = waverec(wavedec(x, w, levels, mode));
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    num += (x[i] - rec[i]) * (x[i] - rec[i]);
                    den += x[i] * x[i];
                }
                EXPECT(std::sqrt(num / den) <= 1e-8,
                       std::string("DWT reconstruction failed for ") + w);
            }

    // WPD energy conservation (every level sees an even input)
    for (const char* w : {"haar", "db2", "db4"})
        for (std::size_t n : {64u, 256u, 1000u, 8192u}) {
            const auto x = random_signal(n, n + 17);
            const auto subbands = wpd_subbands(x, w, 3);
            double total = 0.0, sig = 0.0;
            for (const auto& sb : subbands)
                for (double v : sb) total += v * v;
            for (double v : x) sig += v * v;
            EXPECT(std::abs(total - sig) <= 1e-6 * sig, "WPD energy not conserved");
        }

    // Levinson-Durbin vs direct Yule-Walker
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto x = ar2_signal(0.4, -0.3, 4000, seed);
        for (int order : {1, 2, 5, 10}) {
            const auto r = autocorrelation(x, order);
            const ARFit fit = levinson_durbin(r, order);
            const auto direct = yule_walker_direct(r, order);
            for (int i = 0; i < order; ++i)
                EXPECT(std::abs(fit.coefficients[i] - direct[i]) <= 1e-8,
                       "Levinson-Durbin deviates from the direct solve");
        }
    }
    return {true, "dft/parseval/dwt/wpd/levinson oracles all within tolerance"};
}

// ------------------------------------------------- criterion 2: AR recovery

Outcome criterion2() {
    const auto x = ar2_signal(0.5, -0.25, 50000, 77);
    const ARFit fit = fit_ar(x, 10);
    EXPECT(std::abs(fit.coefficients[0] - 0.5) <= 0.02, "phi_1 outside +-0.02");
    EXPECT(std::abs(fit.coefficients[1] + 0.25) <= 0.02, "phi_2 outside +-0.02");
    for (int i = 2; i < 10; ++i)
        EXPECT(std::abs(fit.coefficients[i]) < 0.05, "higher-order phi not near zero");
    char buf[128];
    std::snprintf(buf, sizeof buf, "phi = (%.4f, %.4f), max |phi_3..10| = %.4f",
                  fit.coefficients[0], fit.coefficients[1],
                  [&] {
                      double m = 0.0;
                      for (int i = 2; i < 10; ++i)
                          m = std::max(m, std::abs(fit.coefficients[i]));
                      return m;
                  }());
    return {true, buf};
}

// ------------------------------------------------- criterion 3: grad check

Outcome criterion3() {
    ModelConfig cfg;
    cfg.channel_mask = {true, false, false, false, false, true};
    cfg.kernel_counts = {4, 3};
    cfg.dense_widths = {8, 4, 2};
    cfg.seed = 2024;
    Model model = make_model(cfg);

    std::array<Tensor, 6> inputs;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 6; ++k) {
        inputs[k] = Tensor(3, kMuscles, kMovements, kFamilyDepth[k]);
        for (auto& v : inputs[k].data) v = g(rng);
    }
    const std::vector<std::array<double, 2>> labels = {{1, 0}, {0, 1}, {0, 1}};
    const double alpha = 0.01;

    model.zero_grads();
    ModelTrace trace = model_forward(model, inputs, true);
    model_backward(model, trace, labels, alpha);

    auto params = model.parameters();
    std::vector<std::vector<double>> analytic;
    for (const auto& p : params) analytic.emplace_back(p.grad, p.grad + p.size);

    auto loss_now = [&] {
        ModelTrace t = model_forward(model, inputs, true);
        return compute_loss(t.probabilities, labels, model, alpha).total;
    };

    const double h = 1e-5;
    long checked = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < params.size(); ++t)
        for (std::size_t i = 0; i < params[t].size; ++i) {
            double& w = params[t].value[i];
            const double keep = w;
            w = keep + h;
            const double up = loss_now();
            w = keep - h;
            const double down = loss_now();
            w = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[t][i];
            const double rel =
                std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
            if (std::abs(a - numeric) > 1e-7 && rel > 1e-4)
                return {false, "gradient mismatch at " + params[t].name + "[" +
                                   std::to_string(i) + "]: analytic " + std::to_string(a) +
                                   " vs numeric " + std::to_string(numeric)};
            worst = std::max(worst, std::abs(a - numeric) <= 1e-7 ? 0.0 : rel);
            ++checked;
        }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%ld parameters checked, worst rel err %.2e", checked,
                  worst);
    return {true, buf};
}

// ------------------------------------------------- criterion 4: shapes

Outcome criterion4() {
    ModelConfig cfg;
    cfg.seed = 1;
    const Model model = make_model(cfg);  // constructor asserts the layout
    const auto path = model.spatial_path();
    EXPECT(path.size() == 4, "expected 4 spatial stages");
    EXPECT((path[0] == std::pair<int, int>{6, 7}), "stage 0 is not 6x7");
    EXPECT((path[1] == std::pair<int, int>{3, 4}), "stage 1 is not 3x4");
    EXPECT((path[2] == std::pair<int, int>{2, 2}), "stage 2 is not 2x2");
    EXPECT((path[3] == std::pair<int, int>{1, 1}), "stage 3 is not 1x1");
    for (const auto& ch : model.channels)
        EXPECT(ch.flat_width == 16, "per-channel flatten is not 16");
    EXPECT(model.concat_width() == 96, "concatenation width is not 96");
    EXPECT(model.dense.size() == 3 && model.dense[0].weights.c == 96 &&
               model.dense[1].weights.c == 32 && model.dense[2].weights.c == 2,
           "dense widths are not 96/32/2");
    return {true, "6x7 -> 3x4 -> 2x2 -> 1x1, flatten 16, concat 96, dense 96/32/2"};
}

// ------------------------------------------------- criterion 5: assembly

Outcome criterion5() {
    auto bundle_with = [](const std::array<int, kMovements>& trials) {
        SubjectBundle b;
        b.subject_id = "acc";
        for (int i = 0; i < kMuscles; ++i)
            for (int j = 0; j < kMovements; ++j)
                for (int k = 0; k < trials[j]; ++k) {
                    Recording r;
                    r.muscle = i;
                    r.movement = j;
                    r.trial = k;
                    r.samples = {1.0, 2.0};
                    b.put(std::move(r));
                }
        return b;
    };

    const auto full = assemble_samples(bundle_with({3, 3, 3, 3, 3, 3, 3}),
                                       AssemblyMode::Exhaustive());
    EXPECT(full.size() == 2187, "full bundle yields " + std::to_string(full.size()));
    std::set<std::array<int, kMovements>> distinct;
    for (const auto& g : full) distinct.insert(g.trial_choice);
    EXPECT(distinct.size() == 2187, "trial choices are not pairwise distinct");

    const std::array<int, kMovements> mixed = {3, 3, 3, 3, 3, 3, 2};
    const auto part = assemble_samples(bundle_with(mixed), AssemblyMode::Exhaustive());
    // brute-force enumeration oracle
    std::set<std::array<int, kMovements>> oracle;
    std::array<int, kMovements> c{};
    while (true) {
        oracle.insert(c);
        int j = kMovements - 1;
        while (j >= 0 && ++c[j] >= mixed[j]) c[j--] = 0;
        if (j < 0) break;
    }
    EXPECT(part.size() == oracle.size(), "mixed bundle count deviates from enumeration");
    std::set<std::array<int, kMovements>> got;
    for (const auto& g : part) got.insert(g.trial_choice);
    EXPECT(got == oracle, "mixed bundle choices deviate from enumeration");
    return {true, "2187 distinct grids; mixed bundle matches brute-force enumeration (1458)"};
}

// ----------------------------------- criterion 6: end-to-end synthetic run

struct CohortData {
    std::vector<LabeledGrids> train, val, test;
};

CohortData build_cohort(double delta, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.subjects_per_class = 20;
    cfg.signal_length = 4096;
    cfg.delta = delta;
    cfg.seed = seed;

    std::vector<std::pair<std::string, int>> roster;
    std::vector<SubjectBundle> bundles;
    char idbuf[16];
    for (int label = 0; label < 2; ++label)
        for (int idx = 0; idx < cfg.subjects_per_class; ++idx) {
            std::snprintf(idbuf, sizeof idbuf, "%s%03d", label ? "p" : "h", idx);
            SubjectBundle b = generate_subject(label, cfg, subject_seed_for(cfg, label, idx));
            b.subject_id = idbuf;
            roster.push_back({b.subject_id, label});
            bundles.push_back(std::move(b));
        }

    const DatasetSplit split = split_subjects(roster, mix_seed(seed, 0x3111));
    auto part_of = [&](const std::string& id) {
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), id) != v.end();
        };
        return in(split.train) ? 0 : in(split.validation) ? 1 : 2;
    };

    std::vector<FeatureSample> parts[3];
    const FeatureConfig fcfg;
    for (const auto& b : bundles) {
        const auto grids = assemble_samples(
            b, AssemblyMode::Random(60, mix_seed(seed, 0xa55e,
                                                 std::hash<std::string>{}(b.subject_id))));
        auto samples = extract_samples(grids, fcfg);
        auto& dst = parts[part_of(b.subject_id)];
        for (auto& s : samples) dst.push_back(std::move(s));
    }

    const ScalerStats scaler = fit_scaler(parts[0], fcfg);
    CohortData data;
    data.train = scale_samples(parts[0], scaler);
    data.val = scale_samples(parts[1], scaler);
    data.test = scale_samples(parts[2], scaler);
    return data;
}

MetricsReport eval_on(Model& model, const std::vector<LabeledGrids>& test) {
    const auto preds = predict(model, test);
    std::vector<double> scores;
    std::vector<int> hard, truth;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        scores.push_back(preds[i].p_patient);
        hard.push_back(preds[i].label);
        truth.push_back(test[i].label);
    }
    return evaluate(scores, hard, truth);
}

// Defaults with the epoch-denominated knobs rescaled to max_epoch 300
// (patience 1500 -> 45, the same 10000/300 factor).
TrainConfig scaled_defaults(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.max_epoch = 300;
    cfg.early_stop_patience = 45;
    cfg.seed = seed;
    return cfg;
}

Outcome criterion6(double budget_s) {
    const bool full = [] {
        const char* v = std::getenv("EMGCS_ACCEPT_FULL");
        return v && std::strcmp(v, "") != 0 && std::strcmp(v, "0") != 0;
    }();

    if (!full) {
        // measure the pipeline and one training epoch, then project
        const auto t0 = Clock::now();
        CohortData data = build_cohort(1.0, 1001);
        const double prep_s = seconds_since(t0);

        TrainConfig cfg = scaled_defaults(1);
        cfg.max_epoch = 1;
        cfg.early_stop_patience = 1;
        const auto t1 = Clock::now();
        TrainResult result = train_model(data.train, data.val, cfg);
        const double epoch_s = seconds_since(t1);

        // every run lasts at least best_round + patience = 46 epochs
        const double projected = 6.0 * (prep_s + 46.0 * epoch_s);
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "cohort prep %.0fs + %.0fs/epoch measured; 5 delta=1 runs + 1 "
                      "delta=0 control at >=46 epochs each projects to >= %.0fs, over the "
                      "900s budget; round-1 val_accuracy %.3f on %zu/%zu/%zu samples; set "
                      "EMGCS_ACCEPT_FULL=1 to run to completion",
                      prep_s, epoch_s, projected, result.history.rounds[0].val_accuracy,
                      data.train.size(), data.val.size(), data.test.size());
        return {projected <= budget_s, buf};
    }

    const auto t0 = Clock::now();
    int ok_seeds = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CohortData data = build_cohort(1.0, 1000 + seed);
        TrainResult result = train_model(data.train, data.val, scaled_defaults(seed));
        const MetricsReport report = eval_on(result.model, data.test);
        const bool ok = report.accuracy >= 0.95 && report.auc && *report.auc >= 0.98;
        ok_seeds += ok ? 1 : 0;
        char buf[96];
        std::snprintf(buf, sizeof buf, " seed%llu: acc %.3f auc %.3f%s",
                      static_cast<unsigned long long>(seed), report.accuracy,
                      report.auc ? *report.auc : -1.0, ok ? "" : " (miss)");
        per_seed += buf;
    }

    CohortData control = build_cohort(0.0, 2000);
    TrainResult null_result = train_model(control.train, control.val, scaled_defaults(9));
    const MetricsReport null_report = eval_on(null_result.model, control.test);
    const bool null_ok =
        null_report.auc && *null_report.auc >= 0.4 && *null_report.auc <= 0.6;

    const double elapsed = seconds_since(t0);
    char buf[768];
    std::snprintf(buf, sizeof buf, "%d/5 seeds hit acc>=0.95 & auc>=0.98;%s; delta=0 auc "
                                   "%.3f; runtime %.0fs (budget %.0fs)",
                  ok_seeds, per_seed.c_str(), null_report.auc ? *null_report.auc : -1.0,
                  elapsed, budget_s);
    return {ok_seeds >= 4 && null_ok && elapsed < budget_s, buf};
}

// ------------------------------------------------- criterion 7: metrics

Outcome criterion7() {
    std::mt19937_64 rng(2718);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + int(rng() % 99);
        std::vector<double> scores(n);
        std::vector<int> truth(n);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const bool discrete = rep % 2 == 0;
        for (int i = 0; i < n; ++i) {
            scores[i] = discrete ? (rng() % 5) / 4.0 : u(rng);
            truth[i] = int(rng() % 2);
        }
        bool has0 = false, has1 = false;
        for (int t : truth) (t ? has1 : has0) = true;
        if (!has0 || !has1) continue;

        // oracle A: exhaustive pairs
        double wins = 0.0;
        long pairs = 0;
        for (int i = 0; i < n; ++i) {
            if (truth[i] != 1) continue;
            for (int j = 0; j < n; ++j) {
                if (truth[j] != 0) continue;
                ++pairs;
                wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
            }
        }
        const double pair_auc = wins / pairs;

        // oracle B: trapezoidal ROC with tie groups
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return scores[a] > scores[b]; });
        long p = 0, nn = 0;
        for (int t : truth) (t == 1 ? p : nn)++;
        double area = 0.0, tpr = 0.0, fpr = 0.0;
        int i = 0;
        while (i < n) {
            int j = i;
            long dp = 0, dn = 0;
            while (j < n && scores[order[j]] == scores[order[i]]) {
                (truth[order[j]] == 1 ? dp : dn)++;
                ++j;
            }
            const double ntpr = tpr + double(dp) / p;
            const double nfpr = fpr + double(dn) / nn;
            area += (nfpr - fpr) * (tpr + ntpr) / 2.0;
            tpr = ntpr;
            fpr = nfpr;
            i = j;
        }

        const double got = auc(scores, truth);
        EXPECT(std::abs(got - pair_auc) <= 1e-12, "auc deviates from pair counting");
        EXPECT(std::abs(got - area) <= 1e-12, "auc deviates from trapezoidal ROC");
    }

    // formula checks on hand-computed confusion examples
    {
        const auto c = confusion_counts({1, 1, 0, 0}, {1, 0, 0, 1});
        EXPECT(c.tp == 1 && c.fp == 1 && c.tn == 1 && c.fn == 1, "hand confusion 1 failed");
        ConfusionCounts k;
        k.tp = 2;
        k.tn = 1;
        k.fp = 1;
        k.fn = 0;
        const auto m = metrics(k);
        EXPECT(m.accuracy == 0.75 && *m.sensitivity == 1.0 && *m.specificity == 0.5,
               "hand metrics failed");
        const auto empty_n = metrics(confusion_counts({1, 1}, {1, 1}));
        EXPECT(!empty_n.specificity.has_value(), "specificity should be undefined");
    }
    return {true, "pair-counting == trapezoidal ROC on 1000 instances; formulas exact"};
}

// --------------------------------- criterion 8: determinism & persistence

Outcome criterion8() {
    // full default architecture on a small synthetic feature set
    SynthConfig scfg;
    scfg.subjects_per_class = 3;
    scfg.signal_length = 512;
    scfg.seed = 55;

    std::vector<FeatureSample> all;
    for (int idx = 0; idx < scfg.subjects_per_class; ++idx)
        for (int label = 0; label < 2; ++label) {
            SubjectBundle b =
                generate_subject(label, scfg, subject_seed_for(scfg, label, idx));
            b.subject_id = (label ? "p" : "h") + std::to_string(idx);
            const auto grids = assemble_samples(b, AssemblyMode::Random(8, 3));
            auto samples = extract_samples(grids, {});
            for (auto& s : samples) all.push_back(std::move(s));
        }
    const ScalerStats scaler = fit_scaler(all, {});
    auto scaled = scale_samples(all, scaler);
    const std::vector<LabeledGrids> train(scaled.begin(), scaled.begin() + 32);
    const std::vector<LabeledGrids> val(scaled.begin() + 32, scaled.end());

    TrainConfig cfg;  // default architecture
    cfg.batch_size = 16;
    cfg.max_epoch = 2;
    cfg.early_stop_patience = 5;
    cfg.seed = 31;

    const TrainResult a = train_model(train, val, cfg);
    const TrainResult b = train_model(train, val, cfg);
    EXPECT(a.history.rounds.size() == b.history.rounds.size(), "round counts differ");
    for (std::size_t i = 0; i < a.history.rounds.size(); ++i) {
        EXPECT(std::memcmp(&a.history.rounds[i].train_loss, &b.history.rounds[i].train_loss,
                           sizeof(LossTerms)) == 0,
               "loss terms differ between identical seeds");
        EXPECT(a.history.rounds[i].val_accuracy == b.history.rounds[i].val_accuracy,
               "validation accuracy differs between identical seeds");
    }

    Model ma = a.model, mb = b.model;
    auto pa = ma.parameters(), pb = mb.parameters();
    for (std::size_t t = 0; t < pa.size(); ++t)
        EXPECT(std::memcmp(pa[t].value, pb[t].value, pa[t].size * sizeof(double)) == 0,
               "best-model weights differ between identical seeds");

    // checkpoint round trip: bit-identical predictions
    const auto tmp = std::filesystem::temp_directory_path() / "emgcs_acceptance_ckpt.bin";
    save_model(ma, scaler, cfg, tmp);
    Checkpoint loaded = load_model(tmp);
    const auto before = predict(ma, val);
    const auto after = predict(loaded.model, val);
    for (std::size_t i = 0; i < before.size(); ++i) {
        EXPECT(before[i].p_patient == after[i].p_patient &&
                   before[i].p_healthy == after[i].p_healthy,
               "round-tripped checkpoint predicts differently");
    }
    std::filesystem::remove(tmp);
    return {true, "bit-identical histories, weights and round-tripped predictions"};
}

// ------------------------------------------------- criterion 9: ablations

Outcome criterion9() {
    // small cohort, full-size network; sweeps only need to run to completion
    SynthConfig scfg;
    scfg.subjects_per_class = 6;
    scfg.signal_length = 1024;
    scfg.delta = 1.0;
    scfg.seed = 321;

    std::vector<std::pair<std::string, int>> roster;
    std::vector<SubjectBundle> bundles;
    for (int label = 0; label < 2; ++label)
        for (int idx = 0; idx < scfg.subjects_per_class; ++idx) {
            SubjectBundle b =
                generate_subject(label, scfg, subject_seed_for(scfg, label, idx));
            b.subject_id = (label ? "p" : "h") + std::to_string(idx);
            roster.push_back({b.subject_id, label});
            bundles.push_back(std::move(b));
        }
    const DatasetSplit split = split_subjects(roster, 5);
    auto part_of = [&](const std::string& id) {
        auto in = [&](const std::vector<std::string>& v) {
            return std::find(v.begin(), v.end(), id) != v.end();
        };
        return in(split.train) ? 0 : in(split.validation) ? 1 : 2;
    };
    std::vector<FeatureSample> parts[3];
    for (const auto& b : bundles) {
        const auto grids = assemble_samples(b, AssemblyMode::Random(10, 17));
        auto samples = extract_samples(grids, {});
        for (auto& s : samples) parts[part_of(b.subject_id)].push_back(std::move(s));
    }
    const ScalerStats scaler = fit_scaler(parts[0], {});
    const auto train = scale_samples(parts[0], scaler);
    const auto val = scale_samples(parts[1], scaler);
    const auto test = scale_samples(parts[2], scaler);

    // 8 channel combinations (three base channels plus subsets of the rest)
    const std::array<std::array<bool, 6>, 8> masks = {{
        {true, true, true, false, false, false},
        {true, true, true, true, false, false},
        {true, true, true, false, true, false},
        {true, true, true, false, false, true},
        {true, true, true, true, true, false},
        {true, true, true, true, false, true},
        {true, true, true, false, true, true},
        {true, true, true, true, true, true},
    }};

    int rows = 0;
    std::printf("    %-28s %8s %8s\n", "configuration", "auc", "accuracy");
    auto run_one = [&](const TrainConfig& cfg, const std::string& name) {
        TrainResult result = train_model(train, val, cfg);
        Model best = result.model;
        const MetricsReport report = eval_on(best, test);
        std::printf("    %-28s %8.4f %8.4f\n", name.c_str(),
                    report.auc ? *report.auc : -1.0, report.accuracy);
        ++rows;
    };

    for (std::size_t i = 0; i < masks.size(); ++i) {
        TrainConfig cfg;
        cfg.batch_size = 32;
        cfg.max_epoch = 3;
        cfg.early_stop_patience = 3;
        cfg.seed = 40 + i;
        cfg.channel_mask = masks[i];
        std::string name = "channels ";
        for (bool m : masks[i]) name += m ? '1' : '0';
        run_one(cfg, name);
    }
    for (int fsz : {6, 5, 4, 3, 2}) {
        TrainConfig cfg;
        cfg.batch_size = 32;
        cfg.max_epoch = 3;
        cfg.early_stop_patience = 3;
        cfg.seed = 60 + fsz;
        cfg.filter_size = fsz;
        run_one(cfg, "filter " + std::to_string(fsz) + "x" + std::to_string(fsz));
    }
    EXPECT(rows == 13, "expected 13 sweep rows");
    return {true, "8 channel-mask and 5 filter-size runs completed, one row each"};
}

struct Criterion {
    int id;
    const char* title;
    Outcome (*fn)(double);
    double budget_s;
};

}  // namespace

int main(int argc, char** argv) {
    const Criterion criteria[] = {
        {1, "numerics oracle suite", [](double b) { return criterion1(); }, 30.0},
        {2, "AR(2) generate-and-recover", [](double b) { return criterion2(); }, 10.0},
        {3, "gradient check (reduced model)", [](double b) { return criterion3(); }, 120.0},
        {4, "network shape contract", [](double b) { return criterion4(); }, 30.0},
        {5, "combinatorial sample assembly", [](double b) { return criterion5(); }, 5.0},
        {6, "end-to-end synthetic run", criterion6, 900.0},
        {7, "metrics equivalence", [](double b) { return criterion7(); }, 10.0},
        {8, "determinism & persistence", [](double b) { return criterion8(); }, 120.0},
        {9, "ablation sweep plumbing", [](double b) { return criterion9(); }, 5400.0},
    };

    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = Clock::now();
        Outcome out;
        try {
            out = c.fn(c.budget_s);
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double dt = seconds_since(t0);
        const bool in_budget = dt < c.budget_s;
        const bool pass = out.pass && in_budget;
        std::printf("[%s] criterion %d (%s): %s [%.1fs, budget %.0fs]\n",
                    pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str(), dt,
                    c.budget_s);
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
