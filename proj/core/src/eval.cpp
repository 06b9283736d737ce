#include "stroketree/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "stroketree/error.hpp"

namespace stroketree {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

EvalReport evaluate(std::span<const std::pair<int, int>> truth_pred, int n_classes) {
    if (truth_pred.empty())
        throw Error("evaluate: no predictions");
    if (n_classes < 1)
        throw Error("evaluate: class count must be positive");

    EvalReport rep;
    rep.n_test = truth_pred.size();
    rep.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
    for (auto [truth, pred] : truth_pred) {
        if (truth < 0 || truth >= n_classes || pred < 0 || pred >= n_classes)
            throw Error("evaluate: label out of range: (" + std::to_string(truth) + ", " +
                        std::to_string(pred) + ") with " + std::to_string(n_classes) +
                        " classes");
        ++rep.confusion[truth][pred];
    }

    std::size_t trace = 0;
    rep.per_class.resize(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        trace += rep.confusion[c][c];
        std::size_t truth_total = 0, pred_total = 0;
        for (int j = 0; j < n_classes; ++j) {
            truth_total += rep.confusion[c][j];
            pred_total += rep.confusion[j][c];
        }
        auto& pc = rep.per_class[c];
        pc.support = truth_total;
        pc.recall = truth_total > 0
                        ? static_cast<double>(rep.confusion[c][c]) / static_cast<double>(truth_total)
                        : 0.0;
        pc.precision = pred_total > 0
                           ? static_cast<double>(rep.confusion[c][c]) / static_cast<double>(pred_total)
                           : 0.0;
    }
    rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.n_test);
    return rep;
}

RocCurve roc_one_vs_rest(const std::vector<std::vector<double>>& scores,
                         std::span<const int> truths, int k) {
    if (scores.size() != truths.size() || scores.empty())
        throw Error("roc_one_vs_rest: scores and truths must be non-empty and equal length");

    std::size_t pos = 0, neg = 0;
    std::vector<std::pair<double, bool>> ranked(scores.size()); // (score_k, is_positive)
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (k < 0 || static_cast<std::size_t>(k) >= scores[i].size())
            throw Error("roc_one_vs_rest: class index " + std::to_string(k) + " out of range");
        const bool positive = truths[i] == k;
        ranked[i] = {scores[i][static_cast<std::size_t>(k)], positive};
        (positive ? pos : neg) += 1;
    }
    if (pos == 0 || neg == 0)
        throw Error("roc_one_vs_rest: class " + std::to_string(k) +
                    " is degenerate (needs both positive and negative examples)");

    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    RocCurve curve;
    curve.class_index = k;
    curve.points.emplace_back(0.0, 0.0); // threshold +inf
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < ranked.size()) {
        const double threshold = ranked[i].first;
        for (; i < ranked.size() && ranked[i].first == threshold; ++i)
            (ranked[i].second ? tp : fp) += 1;
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                                  static_cast<double>(tp) / static_cast<double>(pos));
    }
    // Last point is (1,1): the -inf sentinel that predicts everything positive.

    double auc = 0.0;
    for (std::size_t p = 1; p < curve.points.size(); ++p) {
        const auto [x0, y0] = curve.points[p - 1];
        const auto [x1, y1] = curve.points[p];
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    curve.auc = auc;
    return curve;
}

std::string report_text(const EvalReport& report, const std::vector<std::string>& class_names) {
    std::ostringstream out;
    out << "accuracy: " << fmt(report.accuracy) << "  (" << report.n_test << " instances)\n\n";
    std::size_t w = 5;
    for (const auto& n : class_names) w = std::max(w, n.size());
    out << std::string(w, ' ') << "  precision  recall  support\n";
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        const auto& pc = report.per_class[c];
        out << class_names[c] << std::string(w - class_names[c].size(), ' ') << "     "
            << fmt(pc.precision) << "  " << fmt(pc.recall) << "  " << pc.support << "\n";
    }
    return out.str();
}

std::string report_csv(const EvalReport& report, const std::vector<std::string>& class_names) {
    std::ostringstream out;
    out << "accuracy," << fmt6(report.accuracy) << ",," << report.n_test << "\n";
    out << "class,precision,recall,support\n";
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        const auto& pc = report.per_class[c];
        out << class_names[c] << ',' << fmt6(pc.precision) << ',' << fmt6(pc.recall) << ','
            << pc.support << "\n";
    }
    return out.str();
}

std::string confusion_csv(const EvalReport& report, const std::vector<std::string>& class_names) {
    std::ostringstream out;
    out << "truth\\predicted";
    for (const auto& n : class_names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < class_names.size(); ++r) {
        out << class_names[r];
        for (std::size_t c = 0; c < class_names.size(); ++c) out << ',' << report.confusion[r][c];
        out << '\n';
    }
    return out.str();
}

std::string roc_csv(const RocCurve& curve) {
    std::ostringstream out;
    out << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : curve.points) out << fmt6(fpr) << ',' << fmt6(tpr) << '\n';
    return out.str();
}

std::string compare_report(const std::vector<std::pair<std::string, EvalReport>>& reports,
                           const std::vector<std::string>& class_names) {
    if (reports.empty())
        throw Error("compare_report: no reports");
    std::size_t w = 10;
    for (const auto& [name, rep] : reports) w = std::max(w, name.size());

    std::vector<std::size_t> col(class_names.size());
    for (std::size_t c = 0; c < class_names.size(); ++c)
        col[c] = std::max<std::size_t>(class_names[c].size(), 6); // fmt() values are 6 wide

    std::ostringstream out;
    out << std::string(w, ' ') << "  accuracy";
    for (std::size_t c = 0; c < class_names.size(); ++c)
        out << "  " << std::string(col[c] - class_names[c].size(), ' ') << class_names[c];
    out << '\n';
    for (const auto& [name, rep] : reports) {
        out << name << std::string(w - name.size(), ' ') << "    " << fmt(rep.accuracy);
        for (std::size_t c = 0; c < class_names.size(); ++c) {
            const std::string v = fmt(rep.per_class[c].recall);
            out << "  " << std::string(col[c] - v.size(), ' ') << v;
        }
        out << '\n';
    }
    return out.str();
}

std::string compare_report_csv(const std::vector<std::pair<std::string, EvalReport>>& reports,
                               const std::vector<std::string>& class_names) {
    if (reports.empty())
        throw Error("compare_report_csv: no reports");
    std::ostringstream out;
    out << "classifier,accuracy";
    for (const auto& n : class_names) out << ",recall_" << n;
    out << '\n';
    for (const auto& [name, rep] : reports) {
        out << name << ',' << fmt6(rep.accuracy);
        for (std::size_t c = 0; c < class_names.size(); ++c)
            out << ',' << fmt6(rep.per_class[c].recall);
        out << '\n';
    }
    return out.str();
}

} // namespace stroketree
