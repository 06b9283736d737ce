#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stroketree {

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion; // [truth][predicted]
    struct PerClass {
        double precision = 0.0;
        double recall = 0.0;
        std::size_t support = 0; // truth count
    };
    std::vector<PerClass> per_class;
    std::size_t n_test = 0;
};

/// Accuracy, confusion matrix, and per-class precision/recall from
/// (true label, predicted label) pairs over n_classes classes.
EvalReport evaluate(std::span<const std::pair<int, int>> truth_pred, int n_classes);

/// One-vs-rest ROC: points from (0,0) to (1,1), fpr non-decreasing.
struct RocCurve {
    int class_index = -1;
    std::vector<std::pair<double, double>> points; // (fpr, tpr)
    double auc = 0.0;
};

/// Sweeps thresholds over the distinct scores of class k. Requires both
/// positive and negative examples of k. AUC by the trapezoidal rule.
RocCurve roc_one_vs_rest(const std::vector<std::vector<double>>& scores,
                         std::span<const int> truths, int k);

/// Human-readable report: accuracy, then per-class precision/recall/support.
std::string report_text(const EvalReport& report, const std::vector<std::string>& class_names);

/// Machine-readable twin of report_text: class,precision,recall,support rows
/// preceded by an accuracy row.
std::string report_csv(const EvalReport& report, const std::vector<std::string>& class_names);

/// Confusion matrix as CSV, rows = truth.
std::string confusion_csv(const EvalReport& report, const std::vector<std::string>& class_names);

/// ROC points as CSV: header `fpr,tpr`, one point per line.
std::string roc_csv(const RocCurve& curve);

/// Aligned accuracy / per-class recall table across named classifiers.
std::string compare_report(const std::vector<std::pair<std::string, EvalReport>>& reports,
                           const std::vector<std::string>& class_names);

/// CSV twin of compare_report.
std::string compare_report_csv(const std::vector<std::pair<std::string, EvalReport>>& reports,
                               const std::vector<std::string>& class_names);

} // namespace stroketree
