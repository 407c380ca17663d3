#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmote/dataset.hpp"
#include "gsmote/rng.hpp"

namespace gsmote {

// Deterministic 2-D benchmark datasets. The row count splits into
// n_min = round(n / (ir + 1)) minority rows and the rest majority, so the
// requested imbalance ratio holds within one sample. The optional noise
// fraction swaps labels between round(noise * n_min) minority/majority pairs,
// which corrupts the geometry while preserving both class counts exactly.
struct FixtureSpec {
    std::string kind = "two_gaussians";  // two_gaussians | noisy_moons | sparse_clusters
    double ir = 1.0;
    std::size_t n = 200;
    std::uint64_t seed = 0;
    double noise = 0.0;
};

inline const std::vector<std::string>& fixture_kinds() {
    static const std::vector<std::string> kinds = {"two_gaussians", "noisy_moons",
                                                   "sparse_clusters"};
    return kinds;
}

inline Dataset make_fixture(const FixtureSpec& spec) {
    if (spec.ir < 1.0) throw std::invalid_argument("fixture: ir must be >= 1");
    if (spec.n < 4) throw std::invalid_argument("fixture: n must be >= 4");
    if (spec.noise < 0.0 || spec.noise > 1.0)
        throw std::invalid_argument("fixture: noise must lie in [0, 1]");
    bool known = false;
    for (const auto& k : fixture_kinds()) known = known || k == spec.kind;
    if (!known) {
        std::string kinds;
        for (const auto& k : fixture_kinds()) kinds += (kinds.empty() ? "" : ", ") + k;
        throw std::invalid_argument("fixture: unknown kind '" + spec.kind +
                                    "' (valid kinds: " + kinds + ")");
    }

    const auto n_min =
        static_cast<std::size_t>(std::llround(static_cast<double>(spec.n) / (spec.ir + 1.0)));
    if (n_min < 2 || n_min >= spec.n)
        throw std::invalid_argument("fixture: ir leaves fewer than 2 rows in a class");
    const std::size_t n_maj = spec.n - n_min;

    Rng rng(spec.seed);
    Dataset d;
    d.name = spec.kind;
    d.feature_names = {"f1", "f2"};
    d.label_name = "label";
    d.features = Matrix(0, 2);

    // Majority rows first, then minority rows; draws happen in that order.
    if (spec.kind == "two_gaussians") {
        for (std::size_t i = 0; i < n_maj; ++i) {
            d.features.append_row({rng.normal(), rng.normal()});
            d.labels.push_back("0");
        }
        for (std::size_t i = 0; i < n_min; ++i) {
            d.features.append_row({2.0 + 0.75 * rng.normal(), 2.0 + 0.75 * rng.normal()});
            d.labels.push_back("1");
        }
    } else if (spec.kind == "noisy_moons") {
        for (std::size_t i = 0; i < n_maj; ++i) {
            const double t = 3.14159265358979323846 * rng.uniform();
            d.features.append_row(
                {std::cos(t) + 0.15 * rng.normal(), std::sin(t) + 0.15 * rng.normal()});
            d.labels.push_back("0");
        }
        for (std::size_t i = 0; i < n_min; ++i) {
            const double t = 3.14159265358979323846 * rng.uniform();
            d.features.append_row({1.0 - std::cos(t) + 0.15 * rng.normal(),
                                   0.5 - std::sin(t) + 0.15 * rng.normal()});
            d.labels.push_back("1");
        }
    } else {  // sparse_clusters
        static constexpr double centers[3][2] = {{1.0, 1.0}, {3.0, 1.0}, {2.0, 3.0}};
        for (std::size_t i = 0; i < n_maj; ++i) {
            d.features.append_row({4.0 * rng.uniform(), 4.0 * rng.uniform()});
            d.labels.push_back("0");
        }
        for (std::size_t i = 0; i < n_min; ++i) {
            const auto& c = centers[i % 3];
            d.features.append_row({c[0] + 0.15 * rng.normal(), c[1] + 0.15 * rng.normal()});
            d.labels.push_back("1");
        }
    }

    const auto swaps =
        static_cast<std::size_t>(std::llround(spec.noise * static_cast<double>(n_min)));
    if (swaps > 0) {
        std::vector<int> majority_rows(n_maj), minority_rows(n_min);
        std::iota(majority_rows.begin(), majority_rows.end(), 0);
        std::iota(minority_rows.begin(), minority_rows.end(), static_cast<int>(n_maj));
        rng.shuffle(majority_rows);
        rng.shuffle(minority_rows);
        for (std::size_t i = 0; i < swaps; ++i)
            std::swap(d.labels[majority_rows[i]], d.labels[minority_rows[i]]);
    }

    finalize_dataset(d);
    return d;
}

}  // namespace gsmote
