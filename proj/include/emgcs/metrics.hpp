#pragma once

#include <optional>
#include <string>
#include <vector>

namespace emgcs {

// Positive class = 1 (patient).
struct ConfusionCounts {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    long p() const { return tp + fn; }
    long n() const { return tn + fp; }
    long total() const { return tp + tn + fp + fn; }
};

struct MetricsReport {
    ConfusionCounts counts;
    double accuracy = 0.0;
    std::optional<double> sensitivity;  // empty when no positives were shown
    std::optional<double> specificity;  // empty when no negatives were shown
    std::optional<double> auc;          // empty when truth is single-class

    std::string table() const;
    std::string to_json() const;
};

ConfusionCounts confusion_counts(const std::vector<int>& predictions,
                                 const std::vector<int>& truth);

struct BasicMetrics {
    double accuracy = 0.0;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
};

BasicMetrics metrics(const ConfusionCounts& counts);

// Rank-based (pair-counting) AUC with ties counted 1/2. Throws
// UndefinedMetricError when truth is single-class.
double auc(const std::vector<double>& patient_scores, const std::vector<int>& truth);

MetricsReport evaluate(const std::vector<double>& patient_scores,
                       const std::vector<int>& predictions, const std::vector<int>& truth);

}  // namespace emgcs
