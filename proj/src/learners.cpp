#include "rboost/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rboost/error.hpp"

namespace rboost {

namespace {

struct SplitChoice {
    bool valid = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
};

// Threshold strictly separating a < b, so that a goes left and b goes right.
double midpoint(double a, double b) {
    const double m = a + (b - a) / 2.0;
    return (m < b) ? m : a;
}

// Scans every (feature, midpoint) candidate among the rows owned by `leaf`.
// Gain is the reduction in squared error: SL^2/nL + SR^2/nR - S^2/n.
SplitChoice best_split(const Matrix& x, const SortedColumns& sorted, std::span<const double> r,
                       std::span<const int> owner, int leaf, double total, std::size_t count) {
    SplitChoice best;
    if (count < 2) return best;
    const double base = total * total / static_cast<double>(count);
    for (std::size_t f = 0; f < sorted.cols(); ++f) {
        double sum_left = 0.0;
        std::size_t n_left = 0;
        double prev = 0.0;
        for (std::size_t idx : sorted.order(f)) {
            if (owner[idx] != leaf) continue;
            const double v = x(idx, f);
            if (n_left > 0 && v > prev) {
                const double sum_right = total - sum_left;
                const auto n_right = static_cast<double>(count - n_left);
                const double gain = sum_left * sum_left / static_cast<double>(n_left) +
                                    sum_right * sum_right / n_right - base;
                if (gain > best.gain) best = {true, f, midpoint(prev, v), gain};
            }
            sum_left += r[idx];
            ++n_left;
            prev = v;
        }
    }
    return best;
}

// Mean of the owned residuals, clamped into their range so rounding cannot
// push a leaf outside [min, max].
double leaf_mean(std::span<const double> r, std::span<const int> owner, int leaf) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t n = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (owner[i] != leaf) continue;
        sum += r[i];
        lo = std::min(lo, r[i]);
        hi = std::max(hi, r[i]);
        ++n;
    }
    if (n == 0) return 0.0;
    return std::clamp(sum / static_cast<double>(n), lo, hi);
}

void check_fit_inputs(const Matrix& features, const SortedColumns& sorted, std::span<const double> residuals) {
    if (features.rows() < 1 || features.cols() < 1) throw InvalidInput("fit: empty feature matrix");
    if (residuals.size() != features.rows()) {
        throw InvalidInput("fit: " + std::to_string(residuals.size()) + " residuals for " +
                           std::to_string(features.rows()) + " rows");
    }
    if (sorted.rows() != features.rows() || sorted.cols() != features.cols()) {
        throw InvalidInput("fit: sorted index does not match the feature matrix");
    }
}

}  // namespace

double DecisionStump::operator()(std::span<const double> x) const {
    return x[feature] <= threshold ? left : right;
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidInput("tree: no nodes");
    const auto n = static_cast<int>(nodes_.size());
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<int> stack{0};
    std::size_t leaves = 0;
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (seen[id]) throw InvalidInput("tree: node " + std::to_string(id) + " reached twice");
        seen[id] = 1;
        const TreeNode& node = nodes_[id];
        if (node.is_leaf()) {
            if (!std::isfinite(node.value)) throw InvalidInput("tree: non-finite leaf value");
            ++leaves;
            continue;
        }
        if (node.left < 0 || node.left >= n || node.right < 0 || node.right >= n || node.left == node.right) {
            throw InvalidInput("tree: bad child index at node " + std::to_string(id));
        }
        if (!std::isfinite(node.threshold)) throw InvalidInput("tree: non-finite threshold");
        ++splits_;
        max_feature_ = std::max(max_feature_, static_cast<std::size_t>(node.feature));
        stack.push_back(node.right);
        stack.push_back(node.left);
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw InvalidInput("tree: unreachable node");
    if (leaves != splits_ + 1) throw InvalidInput("tree: leaf count does not equal splits + 1");
}

double RegressionTree::operator()(std::span<const double> x) const {
    const TreeNode* node = &nodes_[0];
    while (!node->is_leaf()) {
        node = &nodes_[x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right];
    }
    return node->value;
}

std::size_t WeakLearner::required_features() const {
    if (const auto* stump = std::get_if<DecisionStump>(&rule)) return stump->feature + 1;
    const auto& tree = std::get<RegressionTree>(rule);
    return tree.split_count() == 0 ? 0 : tree.max_feature() + 1;
}

std::string WeakLearner::summary() const {
    std::ostringstream out;
    if (const auto* stump = std::get_if<DecisionStump>(&rule)) {
        out << "stump(f=" << stump->feature << ",t=" << stump->threshold << ")";
    } else {
        out << "tree(J=" << std::get<RegressionTree>(rule).split_count() << ")";
    }
    if (normalization_scale) out << "*" << *normalization_scale;
    return out.str();
}

double evaluate_learner(const WeakLearner& learner, std::span<const double> x) {
    if (x.size() < learner.required_features()) {
        throw InvalidInput("evaluate: row has " + std::to_string(x.size()) + " features, learner needs " +
                           std::to_string(learner.required_features()));
    }
    const double raw = std::visit([&](const auto& rule) { return rule(x); }, learner.rule);
    return learner.normalization_scale ? raw * *learner.normalization_scale : raw;
}

std::vector<double> evaluate_learner(const WeakLearner& learner, const Matrix& features) {
    std::vector<double> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) out[i] = evaluate_learner(learner, features.row(i));
    return out;
}

SortedColumns::SortedColumns(const Matrix& features) : rows_(features.rows()), order_(features.cols()) {
    for (std::size_t f = 0; f < features.cols(); ++f) {
        auto& order = order_[f];
        order.resize(rows_);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return features(a, f) < features(b, f); });
    }
}

DecisionStump fit_stump(const Matrix& features, std::span<const double> residuals) {
    return fit_stump(features, SortedColumns(features), residuals);
}

DecisionStump fit_stump(const Matrix& features, const SortedColumns& sorted, std::span<const double> residuals) {
    check_fit_inputs(features, sorted, residuals);
    std::vector<int> owner(features.rows(), 0);
    const double total = std::accumulate(residuals.begin(), residuals.end(), 0.0);
    const SplitChoice split = best_split(features, sorted, residuals, owner, 0, total, features.rows());
    if (!split.valid) {
        const double mean = leaf_mean(residuals, owner, 0);
        return DecisionStump{0, features(0, 0), mean, mean, true};
    }
    for (std::size_t i = 0; i < owner.size(); ++i) owner[i] = features(i, split.feature) <= split.threshold ? 0 : 1;
    return DecisionStump{split.feature, split.threshold, leaf_mean(residuals, owner, 0),
                         leaf_mean(residuals, owner, 1), false};
}

RegressionTree fit_tree(const Matrix& features, std::span<const double> residuals, int splits) {
    return fit_tree(features, SortedColumns(features), residuals, splits);
}

RegressionTree fit_tree(const Matrix& features, const SortedColumns& sorted, std::span<const double> residuals,
                        int splits) {
    if (splits < 1) throw InvalidInput("fit_tree: number of splits must be >= 1, got " + std::to_string(splits));
    check_fit_inputs(features, sorted, residuals);

    struct Leaf {
        int node;
        double sum;
        std::size_t count;
        SplitChoice split;
    };

    std::vector<TreeNode> nodes{TreeNode{}};
    std::vector<int> owner(features.rows(), 0);
    const double total = std::accumulate(residuals.begin(), residuals.end(), 0.0);
    std::vector<Leaf> leaves{{0, total, features.rows(), {}}};
    leaves[0].split = best_split(features, sorted, residuals, owner, 0, total, features.rows());

    for (int made = 0; made < splits; ++made) {
        // Largest gain wins; ties go to the earliest-created leaf.
        auto pick = leaves.end();
        for (auto it = leaves.begin(); it != leaves.end(); ++it) {
            if (!it->split.valid) continue;
            if (pick == leaves.end() || it->split.gain > pick->split.gain ||
                (it->split.gain == pick->split.gain && it->node < pick->node)) {
                pick = it;
            }
        }
        if (pick == leaves.end()) break;

        const Leaf parent = *pick;
        leaves.erase(pick);
        const int left = static_cast<int>(nodes.size());
        const int right = left + 1;
        nodes.push_back(TreeNode{});
        nodes.push_back(TreeNode{});
        TreeNode& node = nodes[parent.node];
        node.feature = static_cast<int>(parent.split.feature);
        node.threshold = parent.split.threshold;
        node.left = left;
        node.right = right;

        Leaf l{left, 0.0, 0, {}};
        Leaf r{right, 0.0, 0, {}};
        for (std::size_t i = 0; i < owner.size(); ++i) {
            if (owner[i] != parent.node) continue;
            Leaf& side = features(i, parent.split.feature) <= parent.split.threshold ? l : r;
            owner[i] = side.node;
            side.sum += residuals[i];
            ++side.count;
        }
        l.split = best_split(features, sorted, residuals, owner, left, l.sum, l.count);
        r.split = best_split(features, sorted, residuals, owner, right, r.sum, r.count);
        leaves.push_back(l);
        leaves.push_back(r);
    }

    for (const Leaf& leaf : leaves) nodes[leaf.node].value = leaf_mean(residuals, owner, leaf.node);
    return RegressionTree(std::move(nodes));
}

RegressionTree make_step_function(std::size_t feature, std::span<const double> breakpoints,
                                  std::span<const double> values) {
    if (values.empty() || breakpoints.size() + 1 != values.size()) {
        throw InvalidInput("step function: need one more value than breakpoints");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i - 1] < breakpoints[i])) throw InvalidInput("step function: breakpoints not ascending");
    }
    std::vector<TreeNode> nodes;
    auto build = [&](auto&& self, std::size_t lo, std::size_t hi) -> int {
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        if (hi - lo == 1) {
            nodes[id].value = values[lo];
            return id;
        }
        const std::size_t mid = (lo + hi) / 2;
        const int left = self(self, lo, mid);
        const int right = self(self, mid, hi);
        nodes[id].feature = static_cast<int>(feature);
        nodes[id].threshold = breakpoints[mid - 1];
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    };
    build(build, 0, values.size());
    return RegressionTree(std::move(nodes));
}

Matrix normalize_dictionary_columns(const Matrix& gvals_stack) {
    Matrix out = gvals_stack;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        double sq = 0.0;
        for (double v : row) sq += v * v;
        if (!(sq > 0.0)) throw InvalidInput("normalize: every candidate is zero at sample " + std::to_string(i));
        const double norm = std::sqrt(sq);
        for (double& v : row) v /= norm;
    }
    return out;
}

}  // namespace rboost
