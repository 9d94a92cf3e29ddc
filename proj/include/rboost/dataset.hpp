#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rboost {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

enum class Task { regression, binary_classification };

/// Immutable sample: m x d design matrix, m targets, and the task kind.
///
/// Construction validates m >= 1, d >= 1, finite features, matching target
/// length, and labels in {-1, +1} for classification.
class Dataset {
public:
    Dataset(Matrix features, std::vector<double> targets, Task task);

    const Matrix& features() const noexcept { return features_; }
    std::span<const double> targets() const noexcept { return targets_; }
    Task task() const noexcept { return task_; }
    std::size_t size() const noexcept { return features_.rows(); }
    std::size_t dim() const noexcept { return features_.cols(); }

    /// Rows in the given order (duplicates allowed).
    Dataset subset(std::span<const std::size_t> rows) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Matrix features_;
    std::vector<double> targets_;
    Task task_;
};

}  // namespace rboost
