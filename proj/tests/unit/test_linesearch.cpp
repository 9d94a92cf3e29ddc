#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "helpers.hpp"
#include "rboost/error.hpp"
#include "rboost/linesearch.hpp"
#include "rboost/loss.hpp"

using namespace rboost;

namespace {

double risk_at(LossKind kind, const std::vector<double>& base, const std::vector<double>& g,
               const std::vector<double>& y, double beta) {
    std::vector<double> f(base.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = base[i] + beta * g[i];
    return empirical_risk(kind, f, y);
}

double slope_at(LossKind kind, const std::vector<double>& base, const std::vector<double>& g,
                const std::vector<double>& y, double beta, double h = 1e-6) {
    return (risk_at(kind, base, g, y, beta + h) - risk_at(kind, base, g, y, beta - h)) / (2 * h);
}

// Plain golden-section on a fixed interval, independent of the library's bracketing.
double golden_oracle(const std::function<double(double)>& q, double lo, double hi) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
        const double c = hi - r * (hi - lo);
        const double d = lo + r * (hi - lo);
        if (q(c) < q(d)) {
            hi = d;
        } else {
            lo = c;
        }
    }
    return (lo + hi) / 2;
}

struct Instance {
    std::vector<double> base, g, y;
};

Instance random_instance(std::mt19937_64& rng, LossKind kind, std::size_t m) {
    Instance in;
    in.base = testutil::uniform_vector(rng, m, -1, 1);
    in.g = testutil::uniform_vector(rng, m, -1, 1);
    in.y = kind == LossKind::squared ? testutil::uniform_vector(rng, m, -2, 2) : testutil::random_labels(rng, m);
    // Mixed labels along g keep the classification minimizer finite.
    if (kind != LossKind::squared) {
        in.g[0] = 1;
        in.y[0] = 1;
        in.g[1] = 1;
        in.y[1] = -1;
        in.base[0] = in.base[1] = 0;
    }
    return in;
}

}  // namespace

TEST_CASE("closed-form squared-loss step") {
    CHECK(line_search_l2(std::vector<double>{0, 0}, std::vector<double>{1, 1}, std::vector<double>{2, 2}) == 2);
    CHECK(line_search_l2(std::vector<double>{0, 0}, std::vector<double>{1, 1}, std::vector<double>{1, -1}) == 0);
    CHECK_THROWS_AS(line_search_l2(std::vector<double>{0, 0}, std::vector<double>{0, 0}, std::vector<double>{1, 1}),
                    DegenerateDirection);
    CHECK_THROWS_AS(line_search(LossKind::logistic, std::vector<double>{0}, std::vector<double>{0},
                                std::vector<double>{1}),
                    DegenerateDirection);
}

TEST_CASE("closed form agrees with a golden-section oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Instance in = random_instance(rng, LossKind::squared, 25);
        const double exact = line_search_l2(in.base, in.g, in.y);
        const double oracle = golden_oracle(
            [&](double b) { return risk_at(LossKind::squared, in.base, in.g, in.y, b); }, -100, 100);
        CHECK(std::abs(exact - oracle) <= 1e-6);
        CHECK(std::abs(line_search(LossKind::squared, in.base, in.g, in.y) - exact) <= 1e-9);
    }
}

TEST_CASE("bounded search clamps to the interval") {
    // Unconstrained minimizer is 5.
    const std::vector<double> base{0, 0};
    const std::vector<double> g{1, 1};
    const std::vector<double> y{5, 5};
    LineSearchOptions opts;
    opts.bound = 0.1;
    CHECK(line_search(LossKind::squared, base, g, y, opts) == 0.1);
    const std::vector<double> neg{-5, -5};
    CHECK(line_search(LossKind::squared, base, g, neg, opts) == -0.1);
    opts.bound = 10;
    CHECK(line_search(LossKind::squared, base, g, y, opts) == doctest::Approx(5).epsilon(1e-9));
    opts.bound = -1;
    CHECK_THROWS_AS(line_search(LossKind::squared, base, g, y, opts), InvalidInput);
}

TEST_CASE("logistic step on a small instance is positive and stationary") {
    const std::vector<double> base{0, 0, 0};
    const std::vector<double> y{1, 1, -1};
    const std::vector<double> g{1, 1, -1};
    const std::vector<double> noisy_y{1, -1, -1};
    const double beta = line_search(LossKind::logistic, base, g, noisy_y);
    CHECK(std::abs(slope_at(LossKind::logistic, base, g, noisy_y, beta)) <= 1e-6);
    // y * g > 0 on every sample: the risk decreases without bound.
    CHECK_THROWS_AS(line_search(LossKind::logistic, base, g, y), UnboundedDescent);

    const std::vector<double> b4{0, 0, 0, 0};
    const std::vector<double> y4{1, 1, -1, 1};
    const std::vector<double> g4{1, 1, -1, -1};
    const double b = line_search(LossKind::logistic, b4, g4, y4);
    CHECK(b > 0);
    CHECK(std::abs(slope_at(LossKind::logistic, b4, g4, y4, b)) <= 1e-6);
}

TEST_CASE("separable exponential loss reports the last bracket edge") {
    const std::vector<double> base{0, 0};
    const std::vector<double> g{1, -1};
    const std::vector<double> y{1, -1};
    try {
        line_search(LossKind::exponential, base, g, y);
        FAIL("expected unbounded descent");
    } catch (const UnboundedDescent& e) {
        CHECK(e.edge() == std::ldexp(1.0, 60));
    }
}

TEST_CASE("stationarity over random instances") {
    std::mt19937_64 rng(23);
    for (LossKind kind : {LossKind::squared, LossKind::logistic, LossKind::exponential}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Instance in = random_instance(rng, kind, 12);
            const double beta = line_search(kind, in.base, in.g, in.y);
            const double q = risk_at(kind, in.base, in.g, in.y, beta);
            CHECK(std::abs(slope_at(kind, in.base, in.g, in.y, beta)) <= 1e-6 * (1 + std::abs(q)));
            CHECK(q <= risk_at(kind, in.base, in.g, in.y, 0.0));
        }
    }
}

TEST_CASE("no grid point beats the returned step") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const LossKind kind = trial % 2 == 0 ? LossKind::logistic : LossKind::exponential;
        const Instance in = random_instance(rng, kind, 8);
        const double beta = line_search(kind, in.base, in.g, in.y);
        const double q = risk_at(kind, in.base, in.g, in.y, beta);
        const double reach = 2 * std::abs(beta) + 2;
        double grid_min = std::numeric_limits<double>::infinity();
        const int points = 100000;
        for (int i = 0; i <= points; ++i) {
            const double b = -reach + 2 * reach * i / points;
            grid_min = std::min(grid_min, risk_at(kind, in.base, in.g, in.y, b));
        }
        CHECK(q <= grid_min + 1e-8);
    }
}

TEST_CASE("bounded logistic search respects the bound") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const Instance in = random_instance(rng, LossKind::logistic, 10);
        LineSearchOptions opts;
        opts.bound = 0.05;
        const double beta = line_search(LossKind::logistic, in.base, in.g, in.y, opts);
        CHECK(std::abs(beta) <= 0.05);
        const double free_beta = line_search(LossKind::logistic, in.base, in.g, in.y);
        if (std::abs(free_beta) <= 0.05) {
            CHECK(std::abs(beta - free_beta) <= 1e-8);
        } else {
            CHECK(beta == (free_beta > 0 ? 0.05 : -0.05));
        }
    }
}
