#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsmote/csv.hpp"
#include "gsmote/matrix.hpp"

namespace gsmote {

// Binary-labeled tabular dataset. Immutable after construction; the minority
// class is the rarer one, with lexicographic tie-breaking so balanced inputs
// behave deterministically.
struct Dataset {
    Matrix features;
    std::vector<std::string> labels;  // one per row, original text
    std::vector<std::string> feature_names;
    std::string label_name;
    std::string minority_label;
    std::string majority_label;
    std::string name;
    std::vector<int> minority_indices;
    std::vector<int> majority_indices;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }

    double imbalance_ratio() const {
        return static_cast<double>(majority_indices.size()) /
               static_cast<double>(minority_indices.size());
    }

    bool is_minority(std::size_t row) const { return labels[row] == minority_label; }

    // 0/1 targets with the minority class as the positive class.
    std::vector<int> binary_targets() const {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            y[i] = labels[i] == minority_label ? 1 : 0;
        return y;
    }
};

// Assigns minority/majority labels and index sets from the raw label column.
inline void finalize_dataset(Dataset& d) {
    std::map<std::string, int> counts;
    for (const auto& l : d.labels) counts[l]++;
    if (counts.size() != 2)
        throw std::runtime_error("dataset '" + d.name + "' is not binary: found " +
                                 std::to_string(counts.size()) +
                                 " distinct labels, expected 2");
    auto it = counts.begin();
    const auto& [label_a, count_a] = *it;
    const auto& [label_b, count_b] = *++it;
    // Rarer class is the minority; on a tie the lexicographically smaller
    // label wins (map iteration is already sorted).
    if (count_a <= count_b) {
        d.minority_label = label_a;
        d.majority_label = label_b;
    } else {
        d.minority_label = label_b;
        d.majority_label = label_a;
    }
    d.minority_indices.clear();
    d.majority_indices.clear();
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] == d.minority_label)
            d.minority_indices.push_back(static_cast<int>(i));
        else
            d.majority_indices.push_back(static_cast<int>(i));
    }
}

// Loads a CSV with a header row. The label column is selected by name, or the
// last column when no name is given. Every other cell must parse as a finite
// real number; anything else is a hard error (no imputation).
inline Dataset load_csv(const std::string& path,
                        const std::optional<std::string>& label_column = std::nullopt) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error("empty CSV file: " + path);

    const std::vector<std::string> header = split_csv_line(lines[0]);
    std::size_t label_idx = header.size() - 1;
    if (label_column) {
        bool found = false;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == *label_column) {
                label_idx = i;
                found = true;
                break;
            }
        }
        if (!found)
            throw std::runtime_error("label column '" + *label_column +
                                     "' not found in header of " + path);
    }
    if (header.size() < 2)
        throw std::runtime_error("CSV needs at least one feature column and a label column: " + path);

    Dataset d;
    d.name = path;
    const std::size_t slash = path.find_last_of('/');
    d.name = slash == std::string::npos ? path : path.substr(slash + 1);
    if (d.name.size() > 4 && d.name.ends_with(".csv")) d.name.resize(d.name.size() - 4);

    d.label_name = trim(header[label_idx]);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (i != label_idx) d.feature_names.push_back(trim(header[i]));

    const std::size_t p = header.size() - 1;
    d.features = Matrix(0, p);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        const std::vector<std::string> cells = split_csv_line(lines[row]);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ": row " + std::to_string(row + 1) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(header.size()));
        std::vector<double> values;
        values.reserve(p);
        for (std::size_t col = 0; col < cells.size(); ++col) {
            if (col == label_idx) continue;
            double v;
            if (!parse_cell(cells[col], v))
                throw std::runtime_error(path + ": row " + std::to_string(row + 1) +
                                         ", column " + std::to_string(col + 1) +
                                         ": cannot parse '" + trim(cells[col]) +
                                         "' as a finite number");
            values.push_back(v);
        }
        d.features.append_row(values);
        d.labels.push_back(trim(cells[label_idx]));
    }

    if (d.features.rows() < 2)
        throw std::runtime_error("dataset " + path + " has fewer than 2 rows");
    finalize_dataset(d);
    return d;
}

// Writes the dataset back out; load_csv(save_csv(d)) reproduces features and
// labels exactly.
inline void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::size_t i = 0; i < d.feature_names.size(); ++i) out << d.feature_names[i] << ',';
    out << d.label_name << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.dim(); ++c)
            out << format_double(d.features.at(r, c)) << ',';
        out << d.labels[r] << '\n';
    }
}

// Per-feature [min, max] observed on training rows. Applying the fitted map
// to the fitting data lands every value in [0, 1]; constant features map to 0.
struct ScalingParams {
    std::vector<double> min;
    std::vector<double> max;
};

inline ScalingParams fit_minmax(const Matrix& train) {
    ScalingParams p;
    p.min.assign(train.cols(), 0.0);
    p.max.assign(train.cols(), 0.0);
    for (std::size_t c = 0; c < train.cols(); ++c) {
        double lo = train.at(0, c), hi = train.at(0, c);
        for (std::size_t r = 1; r < train.rows(); ++r) {
            lo = std::min(lo, train.at(r, c));
            hi = std::max(hi, train.at(r, c));
        }
        p.min[c] = lo;
        p.max[c] = hi;
    }
    return p;
}

inline ScalingParams fit_minmax(const Dataset& train) { return fit_minmax(train.features); }

inline Matrix apply_minmax(const ScalingParams& p, const Matrix& features) {
    Matrix out = features;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        const double range = p.max[c] - p.min[c];
        for (std::size_t r = 0; r < out.rows(); ++r) {
            out.at(r, c) = range > 0.0 ? (out.at(r, c) - p.min[c]) / range : 0.0;
        }
    }
    return out;
}

// Inverse of apply_minmax; constant features recover their fitted minimum.
inline Matrix invert_minmax(const ScalingParams& p, const Matrix& scaled) {
    Matrix out = scaled;
    for (std::size_t c = 0; c < out.cols(); ++c) {
        const double range = p.max[c] - p.min[c];
        for (std::size_t r = 0; r < out.rows(); ++r) {
            out.at(r, c) = range > 0.0 ? out.at(r, c) * range + p.min[c] : p.min[c];
        }
    }
    return out;
}

// Number of synthetic minority samples needed for a perfectly balanced set.
inline std::size_t synthetic_count(const Dataset& d) {
    return d.majority_indices.size() - d.minority_indices.size();
}

inline std::size_t synthetic_count(std::size_t majority, std::size_t minority) {
    return majority - minority;
}

}  // namespace gsmote
