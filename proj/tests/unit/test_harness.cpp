#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "rboost/error.hpp"
#include "rboost/harness.hpp"
#include "rboost/synthdata.hpp"

using namespace rboost;

namespace {

Dataset indexed_data(std::size_t n) {
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = static_cast<double>(i);
        y[i] = static_cast<double>(i);
    }
    return Dataset(std::move(x), std::move(y), Task::regression);
}

Split small_split(std::uint64_t seed) {
    return Split{gen_regression(M1Spec{80, 0.3}, SampleRole::train, derive_seed(seed, 0)),
                 gen_regression(M1Spec{60, 0.3}, SampleRole::validation, derive_seed(seed, 1)),
                 gen_regression(M1Spec{100, 0.0}, SampleRole::test_noiseless, derive_seed(seed, 2))};
}

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.make_data = small_split;
    spec.grid = TuningGrid{{0.2, 0.8}, {0.1}, {4.0, 50.0}, {1.0}, 25};
    spec.methods = {Method::boosting, Method::r_boosting};
    return spec;
}

TrainConfig cell_config(const GridCell& cell, int k, const TuneSettings& s) {
    TrainConfig c;
    c.max_iterations = k;
    c.loss = s.loss;
    c.learner = s.learner;
    c.variant = cell.variant;
    c.record_trace = false;
    return c;
}

}  // namespace

TEST_CASE("split sizes and determinism") {
    const Dataset d = indexed_data(100);
    const Split a = split_dataset(d, {0.5, 0.25, 0.25}, 3);
    CHECK(a.train.size() == 50);
    CHECK(a.validation.size() == 25);
    CHECK(a.test.size() == 25);
    const Split b = split_dataset(d, {0.5, 0.25, 0.25}, 3);
    CHECK(testutil::same(a.train.targets(), b.train.targets()));
    CHECK(testutil::same(a.test.targets(), b.test.targets()));
    const Split c = split_dataset(d, {0.5, 0.25, 0.25}, 4);
    CHECK_FALSE(testutil::same(a.train.targets(), c.train.targets()));

    std::vector<double> all;
    for (const Dataset* part : {&a.train, &a.validation, &a.test}) {
        all.insert(all.end(), part->targets().begin(), part->targets().end());
    }
    std::sort(all.begin(), all.end());
    CHECK(testutil::same(all, d.targets()));
    CHECK_THROWS_AS(split_dataset(d, {0.5, 0.5, 0.5}, 0), InvalidInput);
}

TEST_CASE("derived seeds differ across streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("metrics") {
    CHECK(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}) == 0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
    CHECK(misclass_rate(std::vector<double>{0.1, -0.2, 0}, std::vector<double>{1, 1, -1}) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(misclass_rate(std::vector<double>{5, -5}, std::vector<double>{1, -1}) == 0);
    CHECK_THROWS_AS(misclass_rate(std::vector<double>{1}, std::vector<double>{0}), InvalidInput);
    CHECK_THROWS_AS(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), InvalidInput);
    CHECK(evaluate_metric(Metric::misclassification, std::vector<double>{-1}, std::vector<double>{1}) == 1);
}

TEST_CASE("standard grid") {
    const TuningGrid g = TuningGrid::standard(500);
    CHECK(g.nu.size() == 20);
    CHECK(g.nu.front() == 0.01);
    CHECK(g.nu.back() == 1.0);
    CHECK(g.u.size() == 20);
    CHECK(g.u.front() == 1.0);
    CHECK(g.u.back() == 1e6);
    for (std::size_t i = 1; i < g.u.size(); ++i) {
        CHECK(g.u[i] / g.u[i - 1] == doctest::Approx(g.u[1] / g.u[0]).epsilon(1e-12));
    }
    CHECK(testutil::same(g.t0, std::vector<double>{0.5, 1.0, 2.0, 4.0}));
    CHECK(grid_cells(Method::boosting, g).size() == 1);
    CHECK(grid_cells(Method::rs_boosting, g).size() == 20);
    CHECK(grid_cells(Method::eps_boosting, g).size() == 20);
    CHECK(grid_cells(Method::r_boosting, g).size() == 20);
    CHECK(grid_cells(Method::rt_boosting, g).size() == 4);
    for (Method m : kAllMethods) CHECK(parse_method(method_name(m)) == m);
    CHECK_THROWS_AS(parse_method("adaboost"), InvalidInput);
}

TEST_CASE("validation path follows prefix models") {
    const Split s = small_split(1);
    TuneSettings settings;
    const GridCell cell{variant::Rescale{ShrinkageSchedule::experimental(5)}, "u=5"};
    const auto path = validation_path(s.train, s.validation, cell_config(cell, 12, settings), Metric::rmse);
    REQUIRE(path.size() == 12);
    for (int k = 1; k <= 12; k += 5) {
        const auto r = train(s.train, cell_config(cell, k, settings), 0);
        const double direct = rmse(predict(r.model, s.validation.features()), s.validation.targets());
        CHECK(std::abs(path[static_cast<std::size_t>(k - 1)] - direct) <= 1e-10);
    }
}

TEST_CASE("single-cell tuning picks the best prefix") {
    const Split s = small_split(2);
    TuneSettings settings;
    const std::vector<GridCell> cells{{variant::Plain{}, "-"}};
    const auto t = tune_cells(s.train, s.validation, cells, 30, settings);
    const auto path = validation_path(s.train, s.validation, cell_config(cells[0], 30, settings), Metric::rmse);
    const auto best = std::min_element(path.begin(), path.end());
    CHECK(t.best_k == static_cast<int>(best - path.begin()) + 1);
    CHECK(t.best_metric == *best);
    CHECK(t.cell_index == 0);
}

TEST_CASE("tuning matches an exhaustive retraining oracle") {
    const Split s = small_split(3);
    TuneSettings settings;
    const std::vector<GridCell> cells{{variant::Shrunk{0.3}, "nu=0.3"},
                                      {variant::Rescale{ShrinkageSchedule::experimental(3)}, "u=3"},
                                      {variant::Plain{}, "-"}};
    const int k_max = 15;
    const auto t = tune_cells(s.train, s.validation, cells, k_max, settings);

    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    std::size_t best_cell = 0;
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto r = train(s.train, cell_config(cells[c], k, settings), 0);
            const double v = rmse(predict(r.model, s.validation.features()), s.validation.targets());
            if (v < best - 1e-12) {
                best = v;
                best_k = k;
                best_cell = c;
            }
        }
    }
    CHECK(t.best_k == best_k);
    CHECK(t.cell_index == best_cell);
    CHECK(std::abs(t.best_metric - best) <= 1e-10);
}

TEST_CASE("tuning is never worse than any single cell") {
    const Split s = small_split(4);
    TuneSettings settings;
    const TuningGrid g{{0.1, 0.5, 1.0}, {0.05}, {2.0, 20.0}, {1.0}, 20};
    const auto t = tune(s.train, s.validation, Method::rs_boosting, g, settings);
    for (const auto& cell : grid_cells(Method::rs_boosting, g)) {
        const auto path = validation_path(s.train, s.validation, cell_config(cell, 20, settings), Metric::rmse);
        CHECK(t.best_metric <= *std::min_element(path.begin(), path.end()));
    }
}

TEST_CASE("a dominated cell is never chosen") {
    const Split s = small_split(5);
    TuneSettings settings;
    const std::vector<GridCell> cells{{variant::Epsilon{1e-6}, "eps=1e-06"}, {variant::Plain{}, "-"}};
    const auto t = tune_cells(s.train, s.validation, cells, 10, settings);
    CHECK(t.cell_index == 1);
}

TEST_CASE("cells with an invalid schedule are skipped") {
    const Split s = small_split(6);
    TuneSettings settings;
    const std::vector<GridCell> cells{{variant::Rescale{ShrinkageSchedule::experimental(1)}, "u=1"},
                                      {variant::Plain{}, "-"}};
    const auto t = tune_cells(s.train, s.validation, cells, 5, settings);
    CHECK(t.cell_index == 1);
    CHECK(t.failures.size() == 1);
    const std::vector<GridCell> bad{cells[0]};
    CHECK_THROWS_AS(tune_cells(s.train, s.validation, bad, 5, settings), TuningError);
}

TEST_CASE("repeated experiment statistics") {
    const ExperimentSpec spec = small_spec();

    SUBCASE("single run has zero standard error") {
        const auto r = repeat_experiment(spec, 1, 10);
        for (const auto& m : r.methods) {
            CHECK(m.runs == 1);
            CHECK(m.std_error == 0.0);
            CHECK(m.mean == m.metrics[0]);
        }
    }
    SUBCASE("duplicate seeds give identical runs") {
        const std::vector<std::uint64_t> seeds{4, 4};
        const auto r = repeat_experiment(spec, seeds);
        for (const auto& m : r.methods) {
            CHECK(m.metrics[0] == m.metrics[1]);
            CHECK(m.std_error == 0.0);
        }
    }
    SUBCASE("mean and standard error recompute from the metrics") {
        const auto r = repeat_experiment(spec, 4, 20);
        for (const auto& m : r.methods) {
            REQUIRE(m.metrics.size() == 4);
            double mean = 0;
            for (double v : m.metrics) mean += v / 4;
            double ss = 0;
            for (double v : m.metrics) ss += (v - mean) * (v - mean);
            CHECK(std::abs(m.mean - mean) <= 1e-12);
            CHECK(std::abs(m.std_error - std::sqrt(ss / 3) / 2) <= 1e-12);
            CHECK(m.ks.size() == 4);
            CHECK(m.params.size() == 4);
        }
    }
    SUBCASE("seed order does not change the summary") {
        const std::vector<std::uint64_t> fwd{31, 32, 33};
        const std::vector<std::uint64_t> rev{33, 31, 32};
        const auto a = repeat_experiment(spec, fwd);
        const auto b = repeat_experiment(spec, rev);
        for (Method m : spec.methods) {
            CHECK(a.at(m).mean == b.at(m).mean);
            CHECK(a.at(m).std_error == b.at(m).std_error);
        }
    }
}

TEST_CASE("one run equals tune, retrain and score") {
    const ExperimentSpec spec = small_spec();
    const std::uint64_t seed = 42;
    const auto report = repeat_experiment(spec, std::vector<std::uint64_t>{seed});
    const Split s = small_split(seed);
    const auto t = tune(s.train, s.validation, Method::r_boosting, spec.grid, spec.settings);
    const auto r = train(s.train, cell_config(t.cell, t.best_k, spec.settings), 0);
    const double expected = rmse(predict(r.model, s.test.features()), s.test.targets());
    CHECK(std::abs(report.at(Method::r_boosting).metrics[0] - expected) <= 1e-12);
    CHECK(report.at(Method::r_boosting).ks[0] == t.best_k);
}

TEST_CASE("convergence slope") {
    std::vector<double> inv(1024);
    std::vector<double> flat(1024, 0.5);
    std::vector<double> logk(1024);
    for (std::size_t i = 0; i < inv.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        inv[i] = 1 / k;
        logk[i] = std::log(k) / k;
    }
    CHECK(convergence_slope(inv, 1, 1024) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(convergence_slope(flat, 1, 1024)) <= 1e-12);
    const double s = convergence_slope(logk, 32, 1024);
    CHECK(s > -1.0);
    CHECK(s < -0.8);
    std::vector<double> scaled(inv);
    for (double& v : scaled) v *= 37.5;
    CHECK(convergence_slope(scaled, 10, 500) == doctest::Approx(convergence_slope(inv, 10, 500)).epsilon(1e-12));
    CHECK_THROWS_AS(convergence_slope(inv, 5, 6), InvalidInput);
    CHECK_THROWS_AS(convergence_slope(inv, 1, 2000), InvalidInput);
}

TEST_CASE("simulation protocols") {
    CHECK(parse_simulation("m1") == Simulation::m1);
    CHECK(parse_simulation("orange") == Simulation::orange);
    CHECK_THROWS_AS(parse_simulation("m3"), InvalidInput);
    CHECK(default_k_max(Simulation::m2) == 500);
    CHECK(default_k_max(Simulation::orange) == 1000);
    const auto spec = simulation_spec(Simulation::orange, 2, 50);
    const Split s = spec.make_data(1);
    CHECK(s.train.size() == 200);
    CHECK(s.validation.size() == 200);
    CHECK(s.test.size() == 4000);
    CHECK(s.train.dim() == 4);
    CHECK(spec.settings.metric == Metric::misclassification);
    const auto m2spec = simulation_spec(Simulation::m2, 0.0, 50);
    const Split r = m2spec.make_data(1);
    CHECK(r.train.size() == 500);
    CHECK(r.test.size() == 1000);
}
