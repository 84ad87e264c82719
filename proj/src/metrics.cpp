#include "emgcs/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "emgcs/errors.hpp"

namespace emgcs {

ConfusionCounts confusion_counts(const std::vector<int>& predictions,
                                 const std::vector<int>& truth) {
    if (predictions.empty()) throw Error("confusion_counts: empty input");
    if (predictions.size() != truth.size())
        throw ShapeError("confusion_counts: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(truth.size()) + " labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = predictions[i], t = truth[i];
        if ((p != 0 && p != 1) || (t != 0 && t != 1))
            throw LabelError("confusion_counts: labels must be 0/1");
        if (t == 1)
            (p == 1 ? c.tp : c.fn)++;
        else
            (p == 0 ? c.tn : c.fp)++;
    }
    return c;
}

BasicMetrics metrics(const ConfusionCounts& c) {
    if (c.total() == 0) throw Error("metrics: no predictions");
    BasicMetrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.p() + c.n());
    if (c.p() > 0) m.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.p());
    if (c.n() > 0) m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.n());
    return m;
}

double auc(const std::vector<double>& patient_scores, const std::vector<int>& truth) {
    if (patient_scores.size() != truth.size() || truth.empty())
        throw ShapeError("auc: size mismatch or empty");
    long npos = 0, nneg = 0;
    for (int t : truth) (t == 1 ? npos : nneg)++;
    if (npos == 0 || nneg == 0)
        throw UndefinedMetricError("auc undefined: truth contains a single class");

    // average-rank formulation of the pair-counting statistic
    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return patient_scores[a] < patient_scores[b];
    });

    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() &&
               patient_scores[order[j + 1]] == patient_scores[order[i]])
            ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (truth[order[k]] == 1) pos_rank_sum += avg_rank;
        i = j + 1;
    }
    const double u = pos_rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0;
    return u / (static_cast<double>(npos) * static_cast<double>(nneg));
}

MetricsReport evaluate(const std::vector<double>& patient_scores,
                       const std::vector<int>& predictions, const std::vector<int>& truth) {
    MetricsReport report;
    report.counts = confusion_counts(predictions, truth);
    const BasicMetrics m = metrics(report.counts);
    report.accuracy = m.accuracy;
    report.sensitivity = m.sensitivity;
    report.specificity = m.specificity;
    try {
        report.auc = auc(patient_scores, truth);
    } catch (const UndefinedMetricError&) {
        report.auc.reset();
    }
    return report;
}

namespace {
std::string cell(const std::optional<double>& v) {
    if (!v) return "  undefined";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%10.4f", *v);
    return buf;
}
}  // namespace

std::string MetricsReport::table() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%10s %10s %11s %11s\n%s %10.4f %s %s\n"
                  "tp=%ld tn=%ld fp=%ld fn=%ld\n",
                  "AUC", "Accuracy", "Sensitivity", "Specificity",
                  cell(auc).c_str(), accuracy, cell(sensitivity).c_str(),
                  cell(specificity).c_str(), counts.tp, counts.tn, counts.fp, counts.fn);
    return buf;
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["auc"] = auc ? nlohmann::json(*auc) : nlohmann::json(nullptr);
    j["accuracy"] = accuracy;
    j["sensitivity"] = sensitivity ? nlohmann::json(*sensitivity) : nlohmann::json(nullptr);
    j["specificity"] = specificity ? nlohmann::json(*specificity) : nlohmann::json(nullptr);
    j["counts"] = {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp},
                   {"fn", counts.fn}};
    return j.dump(2);
}

}  // namespace emgcs
