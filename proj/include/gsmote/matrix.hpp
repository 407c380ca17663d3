#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gsmote {

// Dense row-major matrix of doubles. Rows are samples, columns are features.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void append_row(std::span<const double> values) {
        if (cols_ == 0) cols_ = values.size();
        if (values.size() != cols_)
            throw std::invalid_argument("append_row: column count mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    void append_row(std::initializer_list<double> values) {
        append_row(std::span<const double>(values.begin(), values.size()));
    }

    void append_rows(const Matrix& other) {
        if (other.empty()) return;
        if (cols_ == 0) cols_ = other.cols_;
        if (other.cols_ != cols_)
            throw std::invalid_argument("append_rows: column count mismatch");
        data_.insert(data_.end(), other.data_.begin(), other.data_.end());
        rows_ += other.rows_;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix gather_rows(const Matrix& m, const std::vector<int>& indices) {
    Matrix out(indices.size(), m.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = m.row(static_cast<std::size_t>(indices[i]));
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

inline double norm(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

}  // namespace gsmote
