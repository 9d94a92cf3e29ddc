#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rboost/dataset.hpp"

namespace rboost {

/// x[feature] <= threshold ? left : right
struct DecisionStump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double left = 0.0;
    double right = 0.0;
    /// Set when no split exists (all rows identical); both leaves hold the mean.
    bool degenerate = false;

    double operator()(std::span<const double> x) const;
    friend bool operator==(const DecisionStump&, const DecisionStump&) = default;
};

/// Internal node when feature >= 0, otherwise a leaf carrying value.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary regression tree; node 0 is the root.
class RegressionTree {
public:
    RegressionTree() : nodes_{TreeNode{}} {}

    /// Validates shape: every child index in range, each node reached exactly
    /// once from the root, internal count + 1 == leaf count.
    explicit RegressionTree(std::vector<TreeNode> nodes);

    std::span<const TreeNode> nodes() const noexcept { return nodes_; }
    std::size_t split_count() const noexcept { return splits_; }
    std::size_t max_feature() const noexcept { return max_feature_; }
    double operator()(std::span<const double> x) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<TreeNode> nodes_;
    std::size_t splits_ = 0;
    std::size_t max_feature_ = 0;
};

/// A dictionary element g in S.
struct WeakLearner {
    std::variant<DecisionStump, RegressionTree> rule;
    std::optional<double> normalization_scale;

    /// Smallest row width the learner can be evaluated on.
    std::size_t required_features() const;
    std::string summary() const;

    friend bool operator==(const WeakLearner&, const WeakLearner&) = default;
};

/// Piecewise-constant output; ties on a threshold go left.
double evaluate_learner(const WeakLearner& learner, std::span<const double> x);

/// Learner outputs at every row of `features`.
std::vector<double> evaluate_learner(const WeakLearner& learner, const Matrix& features);

/// Row indices ordered by each feature, computed once per design matrix and
/// reused by every fit on it.
class SortedColumns {
public:
    explicit SortedColumns(const Matrix& features);
    std::span<const std::size_t> order(std::size_t feature) const { return order_[feature]; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return order_.size(); }

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<std::size_t>> order_;
};

/// Least-squares stump over all (feature, midpoint) candidates. Ties go to the
/// lowest feature index, then the lowest threshold.
DecisionStump fit_stump(const Matrix& features, std::span<const double> residuals);
DecisionStump fit_stump(const Matrix& features, const SortedColumns& sorted, std::span<const double> residuals);

/// Best-first least-squares tree with at most `splits` internal nodes. Stops
/// early when no leaf holds two distinct rows.
RegressionTree fit_tree(const Matrix& features, std::span<const double> residuals, int splits);
RegressionTree fit_tree(const Matrix& features, const SortedColumns& sorted, std::span<const double> residuals,
                        int splits);

/// Piecewise-constant function of one feature: values[i] on the i-th interval
/// cut by ascending `breakpoints` (a point equal to a breakpoint belongs to the
/// interval on its left). Built as a balanced tree.
RegressionTree make_step_function(std::size_t feature, std::span<const double> breakpoints,
                                  std::span<const double> values);

/// Rescales each row (sample) of a samples x candidates output stack to unit
/// Euclidean norm, so that sum_i g_i(x)^2 == 1 at every sample.
Matrix normalize_dictionary_columns(const Matrix& gvals_stack);

}  // namespace rboost
