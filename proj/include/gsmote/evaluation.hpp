#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gsmote/classifiers.hpp"
#include "gsmote/dataset.hpp"
#include "gsmote/metrics.hpp"
#include "gsmote/oversampling.hpp"
#include "gsmote/rng.hpp"

namespace gsmote {

// Stratified fold assignment: classes are visited in sorted label order, each
// class's row indices are shuffled once, and the j-th shuffled index lands in
// fold j mod n_folds. Per-class fold sizes therefore differ by at most one.
inline std::vector<int> stratified_kfold(const std::vector<std::string>& labels,
                                         std::size_t n_folds, Rng& rng) {
    if (n_folds < 2) throw std::invalid_argument("stratified_kfold: need at least 2 folds");
    std::map<std::string, std::vector<int>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_class[labels[i]].push_back(static_cast<int>(i));

    std::vector<int> fold(labels.size(), -1);
    for (auto& [label, rows] : by_class) {
        if (rows.size() < n_folds)
            throw std::runtime_error("stratified_kfold: class '" + label + "' has " +
                                     std::to_string(rows.size()) + " rows but " +
                                     std::to_string(n_folds) + " folds were requested");
        rng.shuffle(rows);
        for (std::size_t j = 0; j < rows.size(); ++j)
            fold[rows[j]] = static_cast<int>(j % n_folds);
    }
    return fold;
}

inline std::vector<int> stratified_kfold(const std::vector<std::string>& labels,
                                         std::size_t n_folds, std::uint64_t seed) {
    Rng rng(seed);
    return stratified_kfold(labels, n_folds, rng);
}

// Row-identity trace of one cross-validation fold, for protocol audits. The
// id vectors hold original dataset row indices exactly as consumed at each
// site; synthetic rows have no original id and appear only as counts.
struct ComboBalance {
    std::string params;
    std::size_t synthetic = 0;
    std::size_t fit_minority = 0;
    std::size_t fit_majority = 0;
    std::vector<int> fit_original_rows;
};

struct FoldTrace {
    int repeat = -1;
    int fold = -1;
    std::vector<int> train_rows;
    std::vector<int> valid_rows;
    std::vector<int> scaler_rows;       // rows whose features fitted the scaler
    std::vector<int> oversampler_rows;  // rows visible to the generators
    std::vector<ComboBalance> combos;
};

using FoldObserver = std::function<void(const FoldTrace&)>;

struct CellRequest {
    const Dataset* data = nullptr;
    std::string method;                      // oversampler id
    std::vector<OversamplerParams> os_grid;  // parameter combos for that id, in grid order
    std::string classifier;                  // classifier family id
    std::vector<ClassifierParams> clf_grid;
    std::size_t n_folds = 5;
    int repeat = 0;
    std::uint64_t root_seed = 0;
};

struct CellRepeatResult {
    std::array<double, 3> scores{};            // per metric, grid maximum of fold means
    std::array<std::string, 3> best_params{};  // combo achieving each maximum
    std::vector<std::string> warnings;         // fallback events with cell context
};

// One cross-validation pass for one (dataset, oversampler, classifier,
// repeat) cell. Per fold: scaling is fitted on training rows only, the
// training fold is oversampled to exact class balance in scaled space, each
// grid combo trains on the augmented fold and scores the untouched validation
// fold. Fold means are maximized over the joint (oversampler x classifier)
// grid independently per metric, earlier combos winning ties.
//
// Seeds: the fold split uses (root, dataset, "cv", repeat); generation uses
// (root, dataset, method, fold, repeat), with every combo of the grid
// restarting an identical stream so cells stay reproducible regardless of
// scheduling.
inline CellRepeatResult run_cell_repeat(const CellRequest& req,
                                        const FoldObserver& observer = {}) {
    const Dataset& d = *req.data;
    const std::vector<int> targets = d.binary_targets();

    const std::uint64_t cv_seed = derive_seed(
        req.root_seed,
        {hash_tag(d.name), hash_tag("cv"), static_cast<std::uint64_t>(req.repeat)});
    Rng cv_rng(cv_seed);
    const std::vector<int> fold_of = stratified_kfold(d.labels, req.n_folds, cv_rng);

    const std::size_t n_os = req.os_grid.size(), n_clf = req.clf_grid.size();
    std::vector<std::array<double, 3>> sums(n_os * n_clf, {0.0, 0.0, 0.0});
    std::set<std::string> warnings;

    for (std::size_t f = 0; f < req.n_folds; ++f) {
        std::vector<int> train_rows, valid_rows;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            (fold_of[i] == static_cast<int>(f) ? valid_rows : train_rows)
                .push_back(static_cast<int>(i));

        const Matrix train_X = gather_rows(d.features, train_rows);
        const Matrix valid_X = gather_rows(d.features, valid_rows);
        const ScalingParams scaling = fit_minmax(train_X);
        const Matrix train_S = apply_minmax(scaling, train_X);
        const Matrix valid_S = apply_minmax(scaling, valid_X);

        std::vector<int> train_y(train_rows.size()), valid_y(valid_rows.size());
        std::vector<int> min_rows, maj_rows;
        Matrix S_min(0, d.dim()), S_maj(0, d.dim());
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            train_y[i] = targets[train_rows[i]];
            if (train_y[i] == 1) {
                min_rows.push_back(train_rows[i]);
                S_min.append_row(train_S.row(i));
            } else {
                maj_rows.push_back(train_rows[i]);
                S_maj.append_row(train_S.row(i));
            }
        }
        for (std::size_t i = 0; i < valid_rows.size(); ++i) valid_y[i] = targets[valid_rows[i]];

        const std::size_t n_syn = S_maj.rows() - S_min.rows();
        const std::uint64_t gen_seed = derive_seed(
            req.root_seed, {hash_tag(d.name), hash_tag(req.method),
                            static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(req.repeat)});

        FoldTrace trace;
        if (observer) {
            trace.repeat = req.repeat;
            trace.fold = static_cast<int>(f);
            trace.train_rows = train_rows;
            trace.valid_rows = valid_rows;
            trace.scaler_rows = train_rows;
            trace.oversampler_rows = train_rows;
        }

        for (std::size_t oi = 0; oi < n_os; ++oi) {
            const OversamplerParams& combo = req.os_grid[oi];
            Rng gen_rng(gen_seed);
            const std::size_t want = combo.method == "none" ? 0 : n_syn;
            SyntheticBatch batch =
                generate(combo, S_min, S_maj, want, d.minority_label, gen_rng);
            for (const std::string& w : batch.warnings)
                warnings.insert(d.name + ":" + describe(combo) + ":fold=" + std::to_string(f) +
                                ":repeat=" + std::to_string(req.repeat) + ": " + w);

            Matrix aug_X = train_S;
            aug_X.append_rows(batch.samples);
            std::vector<int> aug_y = train_y;
            aug_y.insert(aug_y.end(), batch.samples.rows(), 1);

            for (std::size_t ci = 0; ci < n_clf; ++ci) {
                const ClassifierModel model = fit_classifier(req.clf_grid[ci], aug_X, aug_y);
                const std::vector<double> scores = predict_scores(model, valid_S);
                const BinaryMetrics m = compute_metrics(valid_y, scores);
                auto& cell = sums[oi * n_clf + ci];
                cell[0] += m.f_measure;
                cell[1] += m.g_mean;
                cell[2] += m.auc;
            }

            if (observer) {
                ComboBalance cb;
                cb.params = describe(combo);
                cb.synthetic = batch.samples.rows();
                cb.fit_minority = S_min.rows() + batch.samples.rows();
                cb.fit_majority = S_maj.rows();
                cb.fit_original_rows = train_rows;
                trace.combos.push_back(std::move(cb));
            }
        }
        if (observer) observer(trace);
    }

    CellRepeatResult out;
    out.warnings.assign(warnings.begin(), warnings.end());
    const double inv_folds = 1.0 / static_cast<double>(req.n_folds);
    for (std::size_t mi = 0; mi < 3; ++mi) {
        double best = -1.0;
        std::size_t best_oi = 0, best_ci = 0;
        for (std::size_t oi = 0; oi < n_os; ++oi) {
            for (std::size_t ci = 0; ci < n_clf; ++ci) {
                const double mean = sums[oi * n_clf + ci][mi] * inv_folds;
                if (mean > best) {
                    best = mean;
                    best_oi = oi;
                    best_ci = ci;
                }
            }
        }
        out.scores[mi] = best;
        out.best_params[mi] =
            describe(req.os_grid[best_oi]) + "+" + describe(req.clf_grid[best_ci]);
    }
    return out;
}

struct CvCellResult {
    std::string dataset;
    std::string classifier;
    std::string oversampler;
    std::string metric;
    double score = 0.0;
    std::string best_params;
    int repeat = 0;
};

// Convenience wrapper running every repeat of one cell; one result row per
// (metric, repeat). The benchmark runner schedules run_cell_repeat calls
// directly, so this path is mainly for library callers and tests.
inline std::vector<CvCellResult> run_cell(const Dataset& d, const std::string& method,
                                          const std::vector<OversamplerParams>& os_grid,
                                          const std::string& classifier,
                                          const std::vector<ClassifierParams>& clf_grid,
                                          std::size_t n_folds, std::size_t repeats,
                                          std::uint64_t root_seed,
                                          std::vector<std::string>* warnings = nullptr) {
    std::vector<CvCellResult> out;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        CellRequest req;
        req.data = &d;
        req.method = method;
        req.os_grid = os_grid;
        req.classifier = classifier;
        req.clf_grid = clf_grid;
        req.n_folds = n_folds;
        req.repeat = static_cast<int>(rep);
        req.root_seed = root_seed;
        const CellRepeatResult r = run_cell_repeat(req);
        if (warnings)
            warnings->insert(warnings->end(), r.warnings.begin(), r.warnings.end());
        for (std::size_t mi = 0; mi < 3; ++mi) {
            CvCellResult row;
            row.dataset = d.name;
            row.classifier = classifier;
            row.oversampler = method;
            row.metric = metric_ids()[mi];
            row.score = r.scores[mi];
            row.best_params = r.best_params[mi];
            row.repeat = static_cast<int>(rep);
            out.push_back(std::move(row));
        }
    }
    return out;
}

}  // namespace gsmote
