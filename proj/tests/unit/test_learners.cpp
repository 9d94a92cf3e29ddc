#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rboost/error.hpp"
#include "rboost/learners.hpp"

using namespace rboost;

namespace {

double sse(std::span<const double> r, const std::vector<double>& fit) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += (r[i] - fit[i]) * (r[i] - fit[i]);
    return s;
}

struct ScanResult {
    double sse = std::numeric_limits<double>::infinity();
    double score = -1.0;
};

// Every (feature, midpoint) split with leaf means, evaluated directly.
ScanResult exhaustive_scan(const Matrix& x, std::span<const double> r) {
    ScanResult best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> vals;
        for (std::size_t i = 0; i < x.rows(); ++i) vals.push_back(x(i, f));
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t t = 0; t + 1 < vals.size(); ++t) {
            const double thr = (vals[t] + vals[t + 1]) / 2;
            double sl = 0, sr = 0;
            int nl = 0, nr = 0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                if (x(i, f) <= thr) {
                    sl += r[i];
                    ++nl;
                } else {
                    sr += r[i];
                    ++nr;
                }
            }
            std::vector<double> fit(x.rows());
            for (std::size_t i = 0; i < x.rows(); ++i) fit[i] = x(i, f) <= thr ? sl / nl : sr / nr;
            best.sse = std::min(best.sse, sse(r, fit));
            best.score = std::max(best.score, std::sqrt(sl * sl / nl + sr * sr / nr));
        }
    }
    return best;
}

std::vector<double> fitted(const WeakLearner& g, const Matrix& x) { return evaluate_learner(g, x); }

}  // namespace

TEST_CASE("stump evaluation sends ties left") {
    const DecisionStump s{0, 1.5, -1, 1, false};
    CHECK(s(std::vector<double>{1.5}) == -1);
    CHECK(s(std::vector<double>{2.0}) == 1);
    const WeakLearner g{s, 0.5};
    CHECK(evaluate_learner(g, std::vector<double>{2.0}) == 0.5);
    CHECK_THROWS_AS(evaluate_learner(WeakLearner{DecisionStump{2, 0, 0, 0, false}, std::nullopt},
                                     std::vector<double>{1.0}),
                    InvalidInput);
}

TEST_CASE("depth-2 tree matches a hand path trace") {
    // root: x0 <= 0 ? (x1 <= 0.5 ? 1 : 2) : (x1 <= -0.5 ? 3 : 4)
    const RegressionTree tree({
        TreeNode{0, 0.0, 1, 2, 0},
        TreeNode{1, 0.5, 3, 4, 0},
        TreeNode{1, -0.5, 5, 6, 0},
        TreeNode{-1, 0, -1, -1, 1},
        TreeNode{-1, 0, -1, -1, 2},
        TreeNode{-1, 0, -1, -1, 3},
        TreeNode{-1, 0, -1, -1, 4},
    });
    CHECK(tree.split_count() == 3);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10; ++i) {
        const auto x = testutil::uniform_vector(rng, 2, -1, 1);
        double expected = 0;
        if (x[0] <= 0) {
            expected = x[1] <= 0.5 ? 1 : 2;
        } else {
            expected = x[1] <= -0.5 ? 3 : 4;
        }
        CHECK(tree(x) == expected);
    }
}

TEST_CASE("tree shape is validated") {
    CHECK_THROWS_AS(RegressionTree({TreeNode{0, 0.0, 1, 1, 0}, TreeNode{}}), InvalidInput);
    CHECK_THROWS_AS(RegressionTree({TreeNode{0, 0.0, 1, 5, 0}, TreeNode{}}), InvalidInput);
    CHECK_THROWS_AS(RegressionTree({TreeNode{0, 0.0, 0, 1, 0}, TreeNode{}}), InvalidInput);
    CHECK_THROWS_AS(RegressionTree({TreeNode{}, TreeNode{}}), InvalidInput);
    CHECK_NOTHROW(RegressionTree({TreeNode{0, 0.0, 1, 2, 0}, TreeNode{}, TreeNode{}}));
}

TEST_CASE("stump on a step") {
    const Matrix x(4, 1, std::vector<double>{0, 1, 2, 3});
    const std::vector<double> r{1, 1, -1, -1};
    const DecisionStump s = fit_stump(x, r);
    CHECK(s.feature == 0);
    CHECK(s.threshold > 1);
    CHECK(s.threshold < 2);
    CHECK(s.left == 1);
    CHECK(s.right == -1);
    CHECK_FALSE(s.degenerate);
}

TEST_CASE("stump ties go to the lowest feature then the lowest threshold") {
    // Both features carry the same ordering, and r is symmetric so two thresholds tie.
    const Matrix x(4, 2, std::vector<double>{0, 0, 1, 1, 2, 2, 3, 3});
    const std::vector<double> r{1, 0, 0, 1};
    const DecisionStump s = fit_stump(x, r);
    CHECK(s.feature == 0);
    CHECK(s.threshold == 0.5);
}

TEST_CASE("stump with constant residuals fits exactly") {
    std::mt19937_64 rng(2);
    const Matrix x = testutil::uniform_matrix(rng, 10, 2, 0, 1);
    const std::vector<double> r(10, 3.25);
    const DecisionStump s = fit_stump(x, r);
    CHECK(s.left == 3.25);
    CHECK(s.right == 3.25);
}

TEST_CASE("stump on identical rows is degenerate") {
    const Matrix x(3, 2, 1.0);
    const std::vector<double> r{1, 2, 6};
    const DecisionStump s = fit_stump(x, r);
    CHECK(s.degenerate);
    CHECK(s.left == 3);
    CHECK(s.right == 3);
}

TEST_CASE("stump equals the exhaustive scan") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> m_dist(2, 50);
    std::uniform_int_distribution<int> d_dist(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = static_cast<std::size_t>(m_dist(rng));
        const std::size_t d = static_cast<std::size_t>(d_dist(rng));
        Matrix x = testutil::uniform_matrix(rng, m, d, -1, 1);
        // Coarse grid on some trials to exercise repeated feature values.
        if (trial % 3 == 0) {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < d; ++j) x(i, j) = std::round(x(i, j) * 3);
            }
        }
        const auto r = testutil::uniform_vector(rng, m, -2, 2);
        const ScanResult oracle = exhaustive_scan(x, r);
        const DecisionStump s = fit_stump(x, r);
        if (std::isinf(oracle.sse)) {
            CHECK(s.degenerate);
            continue;
        }
        const WeakLearner g{s, std::nullopt};
        const double ours = sse(r, fitted(g, x));
        CHECK(ours == doctest::Approx(oracle.sse).epsilon(1e-12));

        // The chosen partition also maximizes the normalized inner product with r.
        double sl = 0, sr = 0;
        int nl = 0, nr = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (x(i, s.feature) <= s.threshold) {
                sl += r[i];
                ++nl;
            } else {
                sr += r[i];
                ++nr;
            }
        }
        CHECK(std::sqrt(sl * sl / nl + sr * sr / nr) == doctest::Approx(oracle.score).epsilon(1e-12));
    }
}

TEST_CASE("stump leaves lie within the residual range") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix x = testutil::uniform_matrix(rng, 20, 3, -1, 1);
        const auto r = testutil::uniform_vector(rng, 20, -5, 5);
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        const DecisionStump s = fit_stump(x, r);
        CHECK(s.left >= *lo);
        CHECK(s.left <= *hi);
        CHECK(s.right >= *lo);
        CHECK(s.right <= *hi);
    }
}

TEST_CASE("tree with one split equals the stump") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = testutil::uniform_matrix(rng, 30, 3, -1, 1);
        const auto r = testutil::uniform_vector(rng, 30, -1, 1);
        const WeakLearner stump{fit_stump(x, r), std::nullopt};
        const WeakLearner tree{fit_tree(x, r, 1), std::nullopt};
        CHECK(fitted(stump, x) == fitted(tree, x));
    }
}

TEST_CASE("tree shape and monotone training error") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = testutil::uniform_matrix(rng, 40, 3, -1, 1);
        const auto r = testutil::uniform_vector(rng, 40, -1, 1);
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        double previous = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 8; ++j) {
            const RegressionTree t = fit_tree(x, r, j);
            CHECK(t.split_count() == static_cast<std::size_t>(j));
            std::size_t leaves = 0;
            for (const TreeNode& n : t.nodes()) {
                if (!n.is_leaf()) continue;
                ++leaves;
                CHECK(n.value >= *lo);
                CHECK(n.value <= *hi);
            }
            CHECK(leaves == static_cast<std::size_t>(j) + 1);
            const double e = sse(r, fitted(WeakLearner{t, std::nullopt}, x));
            CHECK(e <= previous + 1e-12);
            previous = e;
        }
    }
}

TEST_CASE("tree on a checkerboard beats the stump") {
    Matrix x(64, 2);
    std::vector<double> r(64);
    for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            x(i * 8 + j, 0) = static_cast<double>(i);
            x(i * 8 + j, 1) = static_cast<double>(j);
            r[i * 8 + j] = ((i / 4 + j / 4) % 2 == 0) ? 1.0 : -1.0;
        }
    }
    const double stump_sse = sse(r, fitted(WeakLearner{fit_stump(x, r), std::nullopt}, x));
    const double tree_sse = sse(r, fitted(WeakLearner{fit_tree(x, r, 4), std::nullopt}, x));
    CHECK(tree_sse <= stump_sse);
}

TEST_CASE("tree on constant residuals fits exactly") {
    std::mt19937_64 rng(71);
    const Matrix x = testutil::uniform_matrix(rng, 12, 2, -1, 1);
    const std::vector<double> r(12, -0.75);
    const WeakLearner t{fit_tree(x, r, 4), std::nullopt};
    for (double v : fitted(t, x)) CHECK(v == -0.75);
}

TEST_CASE("tree stops when no leaf can be split") {
    Matrix x(4, 1, std::vector<double>{0, 0, 1, 1});
    const std::vector<double> r{1, 2, 3, 4};
    const RegressionTree t = fit_tree(x, r, 4);
    CHECK(t.split_count() == 1);
    CHECK_THROWS_AS(fit_tree(x, r, 0), InvalidInput);
}

TEST_CASE("evaluation is deterministic") {
    std::mt19937_64 rng(81);
    const Matrix x = testutil::uniform_matrix(rng, 50, 3, -1, 1);
    const auto r = testutil::uniform_vector(rng, 50, -1, 1);
    const WeakLearner t{fit_tree(x, r, 4), std::nullopt};
    CHECK(fitted(t, x) == fitted(t, x));
    CHECK(fit_tree(x, r, 4) == fit_tree(x, r, 4));
}

TEST_CASE("step function") {
    const std::vector<double> br{0.25, 0.5, 0.75};
    const std::vector<double> vals{1, 2, 3, 4};
    const RegressionTree t = make_step_function(0, br, vals);
    CHECK(t(std::vector<double>{0.1}) == 1);
    CHECK(t(std::vector<double>{0.25}) == 1);
    CHECK(t(std::vector<double>{0.3}) == 2);
    CHECK(t(std::vector<double>{0.5}) == 2);
    CHECK(t(std::vector<double>{0.6}) == 3);
    CHECK(t(std::vector<double>{0.9}) == 4);
    CHECK_THROWS_AS(make_step_function(0, br, std::vector<double>{1, 2}), InvalidInput);
    CHECK_THROWS_AS(make_step_function(0, std::vector<double>{0.5, 0.2}, std::vector<double>{1, 2, 3}),
                    InvalidInput);
}

TEST_CASE("dictionary normalization") {
    const Matrix two(1, 2, std::vector<double>{1, 1});
    const Matrix n2 = normalize_dictionary_columns(two);
    CHECK(n2(0, 0) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(n2(0, 1) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));

    const Matrix one(2, 1, std::vector<double>{-3.5, 0.2});
    const Matrix n1 = normalize_dictionary_columns(one);
    CHECK(n1(0, 0) == -1);
    CHECK(n1(1, 0) == 1);

    std::mt19937_64 rng(91);
    const Matrix stack = testutil::uniform_matrix(rng, 50, 4, -3, 3);
    const Matrix n = normalize_dictionary_columns(stack);
    for (std::size_t i = 0; i < n.rows(); ++i) {
        double s = 0;
        for (double v : n.row(i)) s += v * v;
        CHECK(std::abs(s - 1) <= 1e-12);
    }

    CHECK_THROWS_AS(normalize_dictionary_columns(Matrix(2, 2, std::vector<double>{1, 0, 0, 0})), InvalidInput);
}
