#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsmote {

struct BinaryMetrics {
    double f_measure = 0.0;
    double g_mean = 0.0;
    double auc = 0.0;
};

namespace detail {

inline void require_both_classes(const std::vector<int>& y_true) {
    bool pos = false, neg = false;
    for (int y : y_true) (y == 1 ? pos : neg) = true;
    if (!pos || !neg)
        throw std::invalid_argument("metrics: y_true must contain both classes");
}

}  // namespace detail

// Probability that a random positive is scored above a random negative, tied
// pairs counting one half. Computed from average ranks of the scores, which
// is equivalent to summing over all positive-negative pairs.
inline double auc_pairwise(const std::vector<int>& y_true, const std::vector<double>& scores) {
    detail::require_both_classes(y_true);
    const std::size_t n = y_true.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](int a, int b) { return scores[a] < scores[b]; });

    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (y_true[t] == 1) {
            rank_sum_pos += rank[t];
            ++n_pos;
        }
    }
    const std::size_t n_neg = n - n_pos;
    return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
           (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Trapezoidal area under the ROC curve, sweeping thresholds from high to low
// and advancing through tied scores as a single diagonal segment. Agrees with
// auc_pairwise; kept as an independent second route.
inline double auc_trapezoid(const std::vector<int>& y_true, const std::vector<double>& scores) {
    detail::require_both_classes(y_true);
    const std::size_t n = y_true.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](int a, int b) { return scores[a] > scores[b]; });

    double n_pos = 0.0, n_neg = 0.0;
    for (int y : y_true) (y == 1 ? n_pos : n_neg) += 1.0;

    double area = 0.0, tp = 0.0, fp = 0.0;
    std::size_t i = 0;
    while (i < n) {
        const double prev_tp = tp, prev_fp = fp;
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            (y_true[order[j]] == 1 ? tp : fp) += 1.0;
            ++j;
        }
        area += (fp - prev_fp) * (tp + prev_tp) * 0.5;
        i = j;
    }
    return area / (n_pos * n_neg);
}

// F-measure, G-mean, and AUC with class 1 (the minority) as the positive
// class. Scores at or above the threshold predict positive.
inline BinaryMetrics compute_metrics(const std::vector<int>& y_true,
                                     const std::vector<double>& scores,
                                     double threshold = 0.5) {
    detail::require_both_classes(y_true);
    if (y_true.size() != scores.size())
        throw std::invalid_argument("metrics: y_true and scores differ in length");

    double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (y_true[i] == 1)
            (predicted ? tp : fn) += 1.0;
        else
            (predicted ? fp : tn) += 1.0;
    }

    BinaryMetrics m;
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp / (tp + fn);
    m.f_measure = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    const double specificity = tn / (tn + fp);
    m.g_mean = std::sqrt(recall * specificity);
    m.auc = auc_pairwise(y_true, scores);
    return m;
}

inline const std::vector<std::string>& metric_ids() {
    static const std::vector<std::string> ids = {"f_measure", "g_mean", "auc"};
    return ids;
}

inline double metric_by_index(const BinaryMetrics& m, std::size_t idx) {
    switch (idx) {
        case 0: return m.f_measure;
        case 1: return m.g_mean;
        default: return m.auc;
    }
}

}  // namespace gsmote
