#include "rboost/dataset.hpp"

#include <cmath>
#include <string>

#include "rboost/error.hpp"

namespace rboost {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw InvalidInput("matrix: " + std::to_string(values_.size()) + " values for " +
                           std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Dataset::Dataset(Matrix features, std::vector<double> targets, Task task)
    : features_(std::move(features)), targets_(std::move(targets)), task_(task) {
    if (features_.rows() < 1 || features_.cols() < 1) {
        throw InvalidInput("dataset: need at least one row and one column");
    }
    if (targets_.size() != features_.rows()) {
        throw InvalidInput("dataset: " + std::to_string(targets_.size()) + " targets for " +
                           std::to_string(features_.rows()) + " rows");
    }
    for (double v : features_.values()) {
        if (!std::isfinite(v)) throw InvalidInput("dataset: non-finite feature value");
    }
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        const double y = targets_[i];
        if (!std::isfinite(y)) throw InvalidInput("dataset: non-finite target at row " + std::to_string(i));
        if (task_ == Task::binary_classification && y != 1.0 && y != -1.0) {
            throw InvalidInput("dataset: label " + std::to_string(y) + " at row " + std::to_string(i) +
                               " is not -1 or +1");
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    const std::size_t d = dim();
    std::vector<double> x;
    x.reserve(rows.size() * d);
    std::vector<double> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= size()) throw InvalidInput("dataset subset: row " + std::to_string(r) + " out of range");
        auto src = features_.row(r);
        x.insert(x.end(), src.begin(), src.end());
        y.push_back(targets_[r]);
    }
    return Dataset(Matrix(rows.size(), d, std::move(x)), std::move(y), task_);
}

}  // namespace rboost
