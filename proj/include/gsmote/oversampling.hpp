#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmote/csv.hpp"
#include "gsmote/geometry.hpp"
#include "gsmote/matrix.hpp"
#include "gsmote/neighbors.hpp"
#include "gsmote/rng.hpp"

namespace gsmote {

enum class SelectionStrategy { minority, majority, combined };

inline std::string strategy_to_string(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::minority: return "minority";
        case SelectionStrategy::majority: return "majority";
        default: return "combined";
    }
}

inline SelectionStrategy strategy_from_string(const std::string& s) {
    if (s == "minority") return SelectionStrategy::minority;
    if (s == "majority") return SelectionStrategy::majority;
    if (s == "combined") return SelectionStrategy::combined;
    throw std::invalid_argument("unknown selection strategy '" + s +
                                "' (expected minority, majority, or combined)");
}

struct GSmoteConfig {
    std::size_t k = 3;
    double a_trunc = 0.0;     // in [-1, 1]
    double a_def = 0.0;       // in [0, 1]
    SelectionStrategy a_sel = SelectionStrategy::combined;
    std::uint64_t seed = 0;   // used by the single-call convenience overload

    void validate() const {
        if (k == 0) throw std::invalid_argument("gsmote: k must be positive");
        if (a_trunc < -1.0 || a_trunc > 1.0)
            throw std::invalid_argument("gsmote: a_trunc must lie in [-1, 1]");
        if (a_def < 0.0 || a_def > 1.0)
            throw std::invalid_argument("gsmote: a_def must lie in [0, 1]");
    }
};

enum class SurfaceSource { minority, majority };

struct SurfaceSelection {
    std::vector<double> surface;
    double radius = 0.0;
    SurfaceSource source = SurfaceSource::minority;
};

struct SampleOrigin {
    int center_index;      // row in the minority matrix the sample grew from
    SurfaceSource source;
    double radius;         // center-to-surface distance bounding the sample
};

struct SyntheticBatch {
    Matrix samples;
    std::string label;
    std::vector<SampleOrigin> origins;
    std::vector<std::string> warnings;
};

namespace detail {

// Shared selection core. The minority and combined strategies consume exactly
// one neighbor-pick draw; the majority strategy consumes none. Combined keeps
// the minority candidate on a distance tie.
inline SurfaceSelection choose_surface(SelectionStrategy sel, const Matrix& S_min,
                                       const NeighborResult* min_nn, const Matrix& S_maj,
                                       const std::pair<int, double>* maj_nn, Rng& rng) {
    SurfaceSelection out;
    if (sel == SelectionStrategy::majority) {
        const auto row = S_maj.row(maj_nn->first);
        out.surface.assign(row.begin(), row.end());
        out.radius = maj_nn->second;
        out.source = SurfaceSource::majority;
        return out;
    }
    const std::size_t pick = rng.below(min_nn->indices.size());
    if (sel == SelectionStrategy::combined && maj_nn->second < min_nn->dists[pick]) {
        const auto row = S_maj.row(maj_nn->first);
        out.surface.assign(row.begin(), row.end());
        out.radius = maj_nn->second;
        out.source = SurfaceSource::majority;
        return out;
    }
    const auto row = S_min.row(min_nn->indices[pick]);
    out.surface.assign(row.begin(), row.end());
    out.radius = min_nn->dists[pick];
    out.source = SurfaceSource::minority;
    return out;
}

// Stacks the minority rows above the majority rows; row i < S_min.rows() is
// minority point i.
inline Matrix stack_classes(const Matrix& S_min, const Matrix& S_maj) {
    Matrix all(0, S_min.cols());
    all.append_rows(S_min);
    all.append_rows(S_maj);
    return all;
}

inline std::vector<double> interpolate(std::span<const double> from, std::span<const double> to,
                                       double alpha) {
    std::vector<double> out(from.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = from[i] + alpha * (to[i] - from[i]);
    return out;
}

}  // namespace detail

// Chooses the surface point and generation radius for one minority center.
// minority: a uniformly random one of the center's k nearest minority
// neighbors. majority: the nearest majority point. combined: whichever of the
// two candidates is closer, minority winning ties.
inline SurfaceSelection select_surface(int center_idx, const Matrix& S_min, const Matrix& S_maj,
                                       const GSmoteConfig& cfg, Rng& rng) {
    cfg.validate();
    const bool need_min = cfg.a_sel != SelectionStrategy::majority;
    const bool need_maj = cfg.a_sel != SelectionStrategy::minority;
    NeighborResult min_nn;
    std::pair<int, double> maj_nn{-1, 0.0};
    if (need_min) min_nn = knn(S_min, S_min.row(center_idx), cfg.k, center_idx);
    if (need_maj) maj_nn = nearest(S_maj, S_min.row(center_idx));
    return detail::choose_surface(cfg.a_sel, S_min, need_min ? &min_nn : nullptr, S_maj,
                                  need_maj ? &maj_nn : nullptr, rng);
}

// Geometric oversampler. Randomness is consumed in a fixed order: one shuffle
// of the minority rows up front, then per sample the surface pick (when the
// strategy draws one) followed by the unit-ball draws. Centers cycle through
// the single shuffled order, each minority row serving multiple times when N
// exceeds the minority count.
inline SyntheticBatch gsmote_generate(const Matrix& S_maj, const Matrix& S_min, std::size_t N,
                                      const GSmoteConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t p = S_min.cols();
    SyntheticBatch batch;
    batch.samples = Matrix(0, p);
    if (N == 0) return batch;

    const std::size_t n_min = S_min.rows();
    const bool need_min = cfg.a_sel != SelectionStrategy::majority;
    const bool need_maj = cfg.a_sel != SelectionStrategy::minority;
    std::vector<NeighborResult> min_nn(need_min ? n_min : 0);
    std::vector<std::pair<int, double>> maj_nn(need_maj ? n_min : 0);
    for (std::size_t i = 0; i < min_nn.size(); ++i)
        min_nn[i] = knn(S_min, S_min.row(i), cfg.k, static_cast<int>(i));
    for (std::size_t i = 0; i < maj_nn.size(); ++i)
        maj_nn[i] = nearest(S_maj, S_min.row(i));

    std::vector<int> order(n_min);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    for (std::size_t s = 0; s < N; ++s) {
        const int c = order[s % n_min];
        const SurfaceSelection sel =
            detail::choose_surface(cfg.a_sel, S_min, need_min ? &min_nn[c] : nullptr, S_maj,
                                   need_maj ? &maj_nn[c] : nullptr, rng);
        std::vector<double> x = sample_unit_ball(rng, p);
        const auto dir = make_direction(S_min.row(c), sel.surface);
        if (dir) {
            x = truncate(std::move(x), dir->e_par, cfg.a_trunc);
            x = deform(std::move(x), dir->e_par, cfg.a_def);
        }
        batch.samples.append_row(translate(x, S_min.row(c), sel.radius));
        batch.origins.push_back({c, sel.source, sel.radius});
    }
    return batch;
}

inline SyntheticBatch gsmote_generate(const Matrix& S_maj, const Matrix& S_min, std::size_t N,
                                      const GSmoteConfig& cfg) {
    Rng rng(cfg.seed);
    return gsmote_generate(S_maj, S_min, N, cfg, rng);
}

// Linear-interpolation oversampler: x + alpha * (x' - x) with x' a random one
// of x's k nearest minority neighbors and alpha ~ U(0,1). Center cycling and
// draw order (shuffle, then per sample: neighbor pick, alpha) mirror
// gsmote_generate.
inline SyntheticBatch smote_generate(const Matrix& S_min, std::size_t N, std::size_t k,
                                     Rng& rng) {
    SyntheticBatch batch;
    batch.samples = Matrix(0, S_min.cols());
    if (N == 0) return batch;

    const std::size_t n_min = S_min.rows();
    std::vector<NeighborResult> nn(n_min);
    for (std::size_t i = 0; i < n_min; ++i)
        nn[i] = knn(S_min, S_min.row(i), k, static_cast<int>(i));

    std::vector<int> order(n_min);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    for (std::size_t s = 0; s < N; ++s) {
        const int c = order[s % n_min];
        const std::size_t pick = rng.below(k);
        const double alpha = rng.uniform();
        batch.samples.append_row(
            detail::interpolate(S_min.row(c), S_min.row(nn[c].indices[pick]), alpha));
        batch.origins.push_back({c, SurfaceSource::minority, nn[c].dists[pick]});
    }
    return batch;
}

// Borderline variants restrict generation centers to the danger set: minority
// points whose k-neighborhood over the full training set is at least half,
// but not entirely, majority. Variant 1 interpolates toward minority
// neighbors only; variant 2 flips a fair coin per sample and on the majority
// branch interpolates toward one of the nearest majority points with
// alpha ~ U(0, 0.5), keeping the sample on the minority side of the segment.
// An empty danger set falls back to interpolation over all minority points
// and records a warning.
inline SyntheticBatch borderline_smote(const Matrix& S_maj, const Matrix& S_min, std::size_t N,
                                       std::size_t k, int variant, Rng& rng) {
    if (variant != 1 && variant != 2)
        throw std::invalid_argument("borderline_smote: variant must be 1 or 2");
    SyntheticBatch batch;
    batch.samples = Matrix(0, S_min.cols());
    if (N == 0) return batch;

    const std::size_t n_min = S_min.rows();
    const Matrix all = detail::stack_classes(S_min, S_maj);
    std::vector<int> danger;
    for (std::size_t i = 0; i < n_min; ++i) {
        const NeighborResult nn = knn(all, S_min.row(i), k, static_cast<int>(i));
        std::size_t majority_count = 0;
        for (int idx : nn.indices)
            if (idx >= static_cast<int>(n_min)) ++majority_count;
        const double half = static_cast<double>(k) / 2.0;
        if (static_cast<double>(majority_count) >= half && majority_count < k)
            danger.push_back(static_cast<int>(i));
    }
    bool fallback = danger.empty();
    if (fallback) {
        batch.warnings.push_back("borderline" + std::to_string(variant) +
                                 ": danger set is empty; falling back to interpolation over "
                                 "all minority points");
        danger.resize(n_min);
        std::iota(danger.begin(), danger.end(), 0);
    }

    std::vector<NeighborResult> min_nn(n_min);
    for (int c : danger) min_nn[c] = knn(S_min, S_min.row(c), k, c);
    const std::size_t k_maj = std::min<std::size_t>(k, S_maj.rows());
    std::vector<NeighborResult> maj_nn;
    if (variant == 2 && !fallback) {
        maj_nn.resize(n_min);
        for (int c : danger) maj_nn[c] = knn(S_maj, S_min.row(c), k_maj);
    }

    rng.shuffle(danger);

    for (std::size_t s = 0; s < N; ++s) {
        const int c = danger[s % danger.size()];
        bool toward_majority = false;
        if (variant == 2 && !fallback) toward_majority = rng.uniform() >= 0.5;
        if (toward_majority) {
            const std::size_t pick = rng.below(k_maj);
            const double alpha = 0.5 * rng.uniform();
            batch.samples.append_row(
                detail::interpolate(S_min.row(c), S_maj.row(maj_nn[c].indices[pick]), alpha));
            batch.origins.push_back({c, SurfaceSource::majority, maj_nn[c].dists[pick]});
        } else {
            const std::size_t pick = rng.below(k);
            const double alpha = rng.uniform();
            batch.samples.append_row(
                detail::interpolate(S_min.row(c), S_min.row(min_nn[c].indices[pick]), alpha));
            batch.origins.push_back({c, SurfaceSource::minority, min_nn[c].dists[pick]});
        }
    }
    return batch;
}

// Adaptive allocation: each minority point receives synthetic samples in
// proportion to the majority fraction of its k-neighborhood over the full
// training set, rounded by largest remainder so the counts sum to N exactly.
// Generation itself interpolates toward minority neighbors as in
// smote_generate. All-zero weights (no minority point has a majority
// neighbor) degrade to a uniform allocation with a warning.
inline SyntheticBatch adasyn_generate(const Matrix& S_maj, const Matrix& S_min, std::size_t N,
                                      std::size_t k, Rng& rng) {
    SyntheticBatch batch;
    batch.samples = Matrix(0, S_min.cols());
    if (N == 0) return batch;

    const std::size_t n_min = S_min.rows();
    const Matrix all = detail::stack_classes(S_min, S_maj);
    std::vector<double> r(n_min, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n_min; ++i) {
        const NeighborResult nn = knn(all, S_min.row(i), k, static_cast<int>(i));
        std::size_t majority_count = 0;
        for (int idx : nn.indices)
            if (idx >= static_cast<int>(n_min)) ++majority_count;
        r[i] = static_cast<double>(majority_count) / static_cast<double>(k);
        total += r[i];
    }
    if (total == 0.0) {
        batch.warnings.push_back(
            "adasyn: all neighborhood weights are zero; falling back to uniform allocation");
        std::fill(r.begin(), r.end(), 1.0);
        total = static_cast<double>(n_min);
    }

    // Largest-remainder rounding: floors first, leftovers to the largest
    // fractional parts, lower index winning ties.
    std::vector<std::size_t> alloc(n_min, 0);
    std::vector<double> frac(n_min, 0.0);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n_min; ++i) {
        const double quota = static_cast<double>(N) * r[i] / total;
        alloc[i] = static_cast<std::size_t>(quota);
        frac[i] = quota - static_cast<double>(alloc[i]);
        assigned += alloc[i];
    }
    std::vector<int> by_frac(n_min);
    std::iota(by_frac.begin(), by_frac.end(), 0);
    std::stable_sort(by_frac.begin(), by_frac.end(),
                     [&frac](int a, int b) { return frac[a] > frac[b]; });
    for (std::size_t j = 0; assigned < N; ++j, ++assigned) ++alloc[by_frac[j]];

    std::vector<NeighborResult> nn(n_min);
    for (std::size_t i = 0; i < n_min; ++i)
        if (alloc[i] > 0) nn[i] = knn(S_min, S_min.row(i), k, static_cast<int>(i));

    for (std::size_t i = 0; i < n_min; ++i) {
        for (std::size_t s = 0; s < alloc[i]; ++s) {
            const std::size_t pick = rng.below(k);
            const double alpha = rng.uniform();
            batch.samples.append_row(
                detail::interpolate(S_min.row(i), S_min.row(nn[i].indices[pick]), alpha));
            batch.origins.push_back(
                {static_cast<int>(i), SurfaceSource::minority, nn[i].dists[pick]});
        }
    }
    return batch;
}

// Plain duplication: N rows drawn uniformly with replacement.
inline SyntheticBatch random_oversample(const Matrix& S_min, std::size_t N, Rng& rng) {
    if (S_min.rows() == 0)
        throw std::runtime_error("random_oversample: minority set is empty");
    SyntheticBatch batch;
    batch.samples = Matrix(0, S_min.cols());
    for (std::size_t s = 0; s < N; ++s) {
        const int c = static_cast<int>(rng.below(S_min.rows()));
        batch.samples.append_row(S_min.row(c));
        batch.origins.push_back({c, SurfaceSource::minority, 0.0});
    }
    return batch;
}

// One parameter bundle covering every oversampler id; fields irrelevant to a
// given method are ignored by it.
struct OversamplerParams {
    std::string method = "none";
    std::size_t k = 3;
    SelectionStrategy a_sel = SelectionStrategy::combined;
    double a_trunc = 0.0;
    double a_def = 0.0;
};

inline const std::vector<std::string>& method_ids() {
    static const std::vector<std::string> ids = {
        "none", "random", "smote", "borderline1", "borderline2", "adasyn", "gsmote"};
    return ids;
}

inline std::string describe(const OversamplerParams& op) {
    if (op.method == "none" || op.method == "random") return op.method;
    if (op.method == "gsmote") {
        std::string s = "gsmote(sel=" + strategy_to_string(op.a_sel) +
                        ",k=" + std::to_string(op.k) + ",trunc=" + format_double(op.a_trunc) +
                        ",def=" + format_double(op.a_def) + ")";
        return s;
    }
    return op.method + "(k=" + std::to_string(op.k) + ")";
}

// Uniform dispatch used by the evaluation pipeline and the CLI. "none" is the
// no-oversampling baseline and always yields an empty batch.
inline SyntheticBatch generate(const OversamplerParams& op, const Matrix& S_min,
                               const Matrix& S_maj, std::size_t N,
                               const std::string& minority_label, Rng& rng) {
    SyntheticBatch batch;
    if (op.method == "none") {
        batch.samples = Matrix(0, S_min.cols());
    } else if (op.method == "random") {
        batch = random_oversample(S_min, N, rng);
    } else if (op.method == "smote") {
        batch = smote_generate(S_min, N, op.k, rng);
    } else if (op.method == "borderline1") {
        batch = borderline_smote(S_maj, S_min, N, op.k, 1, rng);
    } else if (op.method == "borderline2") {
        batch = borderline_smote(S_maj, S_min, N, op.k, 2, rng);
    } else if (op.method == "adasyn") {
        batch = adasyn_generate(S_maj, S_min, N, op.k, rng);
    } else if (op.method == "gsmote") {
        GSmoteConfig cfg;
        cfg.k = op.k;
        cfg.a_trunc = op.a_trunc;
        cfg.a_def = op.a_def;
        cfg.a_sel = op.a_sel;
        batch = gsmote_generate(S_maj, S_min, N, cfg, rng);
    } else {
        std::string ids;
        for (const auto& id : method_ids()) ids += (ids.empty() ? "" : ", ") + id;
        throw std::invalid_argument("unknown oversampler '" + op.method + "' (valid ids: " +
                                    ids + ")");
    }
    batch.label = minority_label;
    return batch;
}

}  // namespace gsmote
