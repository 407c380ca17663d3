#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gsmote/matrix.hpp"

namespace gsmote {

inline constexpr double kProbFloor = 1e-12;

inline double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow for large |z|.
inline double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double clamp_probability(double v) {
    return std::clamp(v, kProbFloor, 1.0 - kProbFloor);
}

struct LrConfig {
    double learning_rate = 0.1;
    std::size_t max_iter = 5000;
    double tol = 1e-8;
    double l2 = 1e-4;
};

struct LrModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::size_t iterations = 0;
    double final_loss = 0.0;
};

// Mean log-loss plus an L2 penalty on the weights (never the bias). The
// per-row term softplus(z) - y*z equals -log sigma(z) for y=1 and
// -log(1 - sigma(z)) for y=0 without ever forming the probabilities.
inline double lr_loss(const Matrix& X, const std::vector<int>& y,
                      const std::vector<double>& w, double b, double l2) {
    double total = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double z = dot(X.row(i), w) + b;
        total += softplus(z) - static_cast<double>(y[i]) * z;
    }
    double penalty = 0.0;
    for (double wj : w) penalty += wj * wj;
    // Multiply by the reciprocal, as the gradient and the fused evaluation
    // do, so all three paths round identically.
    return total * (1.0 / static_cast<double>(X.rows())) + 0.5 * l2 * penalty;
}

// Analytic gradient of lr_loss; returns d/dw in `gw` and d/db in `gb`.
inline void lr_gradient(const Matrix& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double l2,
                        std::vector<double>& gw, double& gb) {
    const std::size_t n = X.rows(), p = X.cols();
    gw.assign(p, 0.0);
    gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = X.row(i);
        const double err = stable_sigmoid(dot(row, w) + b) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < p; ++j) gw[j] += err * row[j];
        gb += err;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < p; ++j) gw[j] = gw[j] * inv + l2 * w[j];
    gb *= inv;
}

namespace detail {

// One pass computing loss and gradient together. The exp(-|z|) value is
// shared between the softplus and sigmoid terms, matching them bit for bit
// while halving the transcendental work on this hot path.
inline double lr_eval(const Matrix& X, const std::vector<int>& y,
                      const std::vector<double>& w, double b, double l2,
                      std::vector<double>& gw, double& gb) {
    const std::size_t n = X.rows(), p = X.cols();
    gw.assign(p, 0.0);
    gb = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = X.row(i);
        const double z = dot(row, w) + b;
        const double yi = static_cast<double>(y[i]);
        const double e = std::exp(z > 0.0 ? -z : z);
        const double soft = std::log1p(e);
        const double sig = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
        total += (z > 0.0 ? z + soft : soft) - yi * z;
        const double err = sig - yi;
        for (std::size_t j = 0; j < p; ++j) gw[j] += err * row[j];
        gb += err;
    }
    const double inv = 1.0 / static_cast<double>(n);
    double penalty = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        gw[j] = gw[j] * inv + l2 * w[j];
        penalty += w[j] * w[j];
    }
    gb *= inv;
    return total * inv + 0.5 * l2 * penalty;
}

}  // namespace detail

// Full-batch gradient descent from zero weights. A step that would raise the
// loss is retried with a persistently halved learning rate, so accepted
// losses are non-increasing. Stops on a loss change below tol, a vanishing
// step size, or the iteration cap. Non-finite loss aborts: it signals
// unscaled or corrupt input.
inline LrModel lr_fit(const Matrix& X, const std::vector<int>& y, const LrConfig& cfg = {}) {
    if (X.rows() == 0 || X.rows() != y.size())
        throw std::invalid_argument("lr_fit: feature/label row counts differ");
    const std::size_t p = X.cols();
    LrModel model;
    model.weights.assign(p, 0.0);

    std::vector<double> gw, gw_next;
    double gb = 0.0, gb_next = 0.0;
    double loss = detail::lr_eval(X, y, model.weights, model.bias, cfg.l2, gw, gb);
    if (!std::isfinite(loss)) throw std::runtime_error("lr_fit: non-finite loss");

    double eta = cfg.learning_rate;
    std::vector<double> w_next(p);
    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        if (eta < 1e-15) break;
        for (std::size_t j = 0; j < p; ++j) w_next[j] = model.weights[j] - eta * gw[j];
        const double b_next = model.bias - eta * gb;
        const double next_loss = detail::lr_eval(X, y, w_next, b_next, cfg.l2, gw_next, gb_next);
        if (!std::isfinite(next_loss)) throw std::runtime_error("lr_fit: non-finite loss");
        if (next_loss > loss) {
            eta *= 0.5;
            continue;
        }
        model.weights.swap(w_next);
        model.bias = b_next;
        gw.swap(gw_next);
        gb = gb_next;
        ++model.iterations;
        const double change = loss - next_loss;
        loss = next_loss;
        if (change < cfg.tol) break;
    }
    model.final_loss = loss;
    return model;
}

inline std::vector<double> lr_predict_proba(const LrModel& model, const Matrix& X) {
    if (X.cols() != model.weights.size())
        throw std::invalid_argument("lr_predict_proba: feature dimension mismatch");
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i)
        out[i] = clamp_probability(stable_sigmoid(dot(X.row(i), model.weights) + model.bias));
    return out;
}

struct GbcConfig {
    std::size_t n_estimators = 100;
    std::size_t max_depth = 5;
    double learning_rate = 0.1;
    std::size_t min_samples_leaf = 1;
};

struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // rows with x[feature] <= threshold go left
    int left = -1;
    int right = -1;
    double value = 0.0;      // leaf output with shrinkage baked in
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> row) const {
        int at = 0;
        while (nodes[at].feature >= 0)
            at = row[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
        return nodes[at].value;
    }
};

struct GbcModel {
    double initial_score = 0.0;  // log-odds of the training positive rate
    std::vector<RegressionTree> trees;
    GbcConfig config;
    std::vector<double> stage_losses;  // train log-loss before boosting, then after each stage
};

namespace detail {

// Grows one regression tree on the residuals. Rows arrive presorted per
// feature and are partitioned in place down the tree, so no per-node sorting
// happens. Split gain is the variance-reduction form S_L^2/n_L + S_R^2/n_R -
// S^2/n; ties keep the first candidate visited (lowest feature, then lowest
// threshold). Leaves take the one-step update sum(residual)/sum(hessian) and
// also record their value per training row for the caller's line search.
class TreeBuilder {
  public:
    TreeBuilder(const Matrix& X, const std::vector<double>& residual,
                const std::vector<double>& hessian, const GbcConfig& cfg,
                std::vector<double>& contrib)
        : X_(X), residual_(residual), hessian_(hessian), cfg_(cfg), contrib_(contrib) {}

    RegressionTree run(std::vector<std::vector<int>> rows_by_feature) {
        tree_.nodes.clear();
        build(std::move(rows_by_feature), 0);
        return std::move(tree_);
    }

  private:
    int build(std::vector<std::vector<int>> rows_by_feature, std::size_t depth) {
        const std::vector<int>& ids = rows_by_feature[0];
        const std::size_t m = ids.size();
        double sum = 0.0;
        for (int id : ids) sum += residual_[id];

        int best_feature = -1;
        double best_threshold = 0.0, best_gain = 0.0;
        if (depth < cfg_.max_depth && m >= 2 * cfg_.min_samples_leaf) {
            const double parent = sum * sum / static_cast<double>(m);
            for (std::size_t f = 0; f < X_.cols(); ++f) {
                const std::vector<int>& ord = rows_by_feature[f];
                double left_sum = 0.0;
                for (std::size_t i = 0; i + 1 < m; ++i) {
                    left_sum += residual_[ord[i]];
                    const double a = X_.at(ord[i], f);
                    const double b = X_.at(ord[i + 1], f);
                    if (a == b) continue;
                    const std::size_t n_left = i + 1, n_right = m - n_left;
                    if (n_left < cfg_.min_samples_leaf || n_right < cfg_.min_samples_leaf)
                        continue;
                    const double right_sum = sum - left_sum;
                    const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                                        right_sum * right_sum / static_cast<double>(n_right) -
                                        parent;
                    if (gain > best_gain) {
                        double t = 0.5 * (a + b);
                        if (t >= b) t = a;  // midpoint rounded up to b would route both sides left
                        best_gain = gain;
                        best_feature = static_cast<int>(f);
                        best_threshold = t;
                    }
                }
            }
        }

        if (best_feature < 0 || best_gain <= 1e-12) {
            double denom = 0.0;
            for (int id : ids) denom += hessian_[id];
            const double value = denom > 0.0 ? sum / denom : 0.0;
            for (int id : ids) contrib_[id] = value;
            TreeNode leaf;
            leaf.value = value;
            tree_.nodes.push_back(leaf);
            return static_cast<int>(tree_.nodes.size()) - 1;
        }

        const std::size_t p = X_.cols();
        std::vector<std::vector<int>> left_rows(p), right_rows(p);
        for (std::size_t f = 0; f < p; ++f) {
            for (int id : rows_by_feature[f]) {
                if (X_.at(id, best_feature) <= best_threshold)
                    left_rows[f].push_back(id);
                else
                    right_rows[f].push_back(id);
            }
        }

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        tree_.nodes.push_back(node);
        const int at = static_cast<int>(tree_.nodes.size()) - 1;
        const int left = build(std::move(left_rows), depth + 1);
        const int right = build(std::move(right_rows), depth + 1);
        tree_.nodes[at].left = left;
        tree_.nodes[at].right = right;
        return at;
    }

    const Matrix& X_;
    const std::vector<double>& residual_;
    const std::vector<double>& hessian_;
    const GbcConfig& cfg_;
    std::vector<double>& contrib_;
    RegressionTree tree_;
};

inline double mean_log_loss(const std::vector<double>& scores, const std::vector<int>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i)
        total += softplus(scores[i]) - static_cast<double>(y[i]) * scores[i];
    return total / static_cast<double>(scores.size());
}

}  // namespace detail

// Stagewise boosting on log-loss: each tree fits the residuals y - p, leaves
// take a one-step update, and the stage enters at the configured learning
// rate. If a stage would raise the training loss (the one-step update can
// overshoot on tiny leaves), its scale is halved until it no longer does,
// zeroing out after 60 halvings; the final scale is baked into the stored
// leaf values. Training loss is therefore non-increasing stage over stage.
inline GbcModel gbc_fit(const Matrix& X, const std::vector<int>& y, const GbcConfig& cfg = {}) {
    if (X.rows() == 0 || X.rows() != y.size())
        throw std::invalid_argument("gbc_fit: feature/label row counts differ");
    const std::size_t n = X.rows(), p = X.cols();

    GbcModel model;
    model.config = cfg;
    double pos = 0.0;
    for (int yi : y) pos += static_cast<double>(yi);
    pos = clamp_probability(pos / static_cast<double>(n));
    model.initial_score = std::log(pos / (1.0 - pos));

    std::vector<double> scores(n, model.initial_score);
    double loss = detail::mean_log_loss(scores, y);
    model.stage_losses.push_back(loss);

    std::vector<std::vector<int>> sorted(p, std::vector<int>(n));
    for (std::size_t f = 0; f < p; ++f) {
        std::iota(sorted[f].begin(), sorted[f].end(), 0);
        std::sort(sorted[f].begin(), sorted[f].end(), [&X, f](int a, int b) {
            const double va = X.at(a, f), vb = X.at(b, f);
            return va < vb || (va == vb && a < b);
        });
    }

    std::vector<double> residual(n), hessian(n), contrib(n), trial(n);
    for (std::size_t stage = 0; stage < cfg.n_estimators; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = stable_sigmoid(scores[i]);
            residual[i] = static_cast<double>(y[i]) - pi;
            hessian[i] = pi * (1.0 - pi);
        }
        detail::TreeBuilder builder(X, residual, hessian, cfg, contrib);
        RegressionTree tree = builder.run(sorted);

        double scale = cfg.learning_rate;
        double next_loss = loss;
        for (int halving = 0;; ++halving) {
            if (halving >= 60) {
                scale = 0.0;
                next_loss = loss;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) trial[i] = scores[i] + scale * contrib[i];
            next_loss = detail::mean_log_loss(trial, y);
            if (next_loss <= loss) break;
            scale *= 0.5;
        }

        for (std::size_t i = 0; i < n; ++i) scores[i] += scale * contrib[i];
        for (TreeNode& node : tree.nodes)
            if (node.feature < 0) node.value *= scale;
        loss = next_loss;
        model.stage_losses.push_back(loss);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

inline std::vector<double> gbc_predict_proba(const GbcModel& model, const Matrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double score = model.initial_score;
        const auto row = X.row(i);
        for (const RegressionTree& tree : model.trees) score += tree.predict(row);
        out[i] = clamp_probability(stable_sigmoid(score));
    }
    return out;
}

// One parameter bundle covering both classifier families; depth/estimator
// fields only apply to the boosted trees.
struct ClassifierParams {
    std::string id = "lr";
    std::size_t max_depth = 5;
    std::size_t n_estimators = 100;
};

inline std::string describe(const ClassifierParams& cp) {
    if (cp.id == "lr") return "lr";
    return cp.id + "(depth=" + std::to_string(cp.max_depth) +
           ",trees=" + std::to_string(cp.n_estimators) + ")";
}

using ClassifierModel = std::variant<LrModel, GbcModel>;

inline ClassifierModel fit_classifier(const ClassifierParams& cp, const Matrix& X,
                                      const std::vector<int>& y) {
    if (cp.id == "lr") return lr_fit(X, y);
    if (cp.id == "gbc") {
        GbcConfig cfg;
        cfg.max_depth = cp.max_depth;
        cfg.n_estimators = cp.n_estimators;
        return gbc_fit(X, y, cfg);
    }
    throw std::invalid_argument("unknown classifier '" + cp.id + "' (valid ids: lr, gbc)");
}

inline std::vector<double> predict_scores(const ClassifierModel& model, const Matrix& X) {
    if (std::holds_alternative<LrModel>(model))
        return lr_predict_proba(std::get<LrModel>(model), X);
    return gbc_predict_proba(std::get<GbcModel>(model), X);
}

}  // namespace gsmote
