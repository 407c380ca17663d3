#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmote/matrix.hpp"

namespace gsmote {

struct NeighborResult {
    std::vector<int> indices;    // row indices into the searched matrix
    std::vector<double> dists;   // matching Euclidean distances, ascending
};

// Brute-force k-nearest-neighbor search of `query` against the rows of
// `points`. Ties in distance resolve to the lower row index so results are
// reproducible across platforms. `exclude` removes one row (typically the
// query itself when it is a member of `points`).
inline NeighborResult knn(const Matrix& points, std::span<const double> query,
                          std::size_t k, int exclude = -1) {
    const std::size_t available = points.rows() - (exclude >= 0 ? 1 : 0);
    if (k == 0) throw std::invalid_argument("knn: k must be positive");
    if (available < k)
        throw std::runtime_error("knn: need " + std::to_string(k) +
                                 " neighbors but only " + std::to_string(available) +
                                 " candidate points are available");

    std::vector<std::pair<double, int>> heap;  // (squared distance, index)
    heap.reserve(k + 1);
    for (std::size_t r = 0; r < points.rows(); ++r) {
        if (static_cast<int>(r) == exclude) continue;
        const double d2 = squared_distance(points.row(r), query);
        const std::pair<double, int> cand{d2, static_cast<int>(r)};
        if (heap.size() < k) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    std::sort_heap(heap.begin(), heap.end());

    NeighborResult out;
    out.indices.reserve(k);
    out.dists.reserve(k);
    for (const auto& [d2, idx] : heap) {
        out.indices.push_back(idx);
        out.dists.push_back(std::sqrt(d2));
    }
    return out;
}

// Single nearest neighbor; same tie-breaking and exclusion rules as knn.
inline std::pair<int, double> nearest(const Matrix& points, std::span<const double> query,
                                      int exclude = -1) {
    NeighborResult r = knn(points, query, 1, exclude);
    return {r.indices[0], r.dists[0]};
}

}  // namespace gsmote
