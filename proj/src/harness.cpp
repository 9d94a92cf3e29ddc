#include "rboost/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "rboost/error.hpp"
#include "rboost/synthdata.hpp"

namespace rboost {

namespace {

void check_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw InvalidInput(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
    }
    if (a == 0) throw InvalidInput(std::string(what) + ": empty input");
}

// Runs fn(0..n-1) on up to hardware_concurrency threads. Each index writes
// only its own slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

std::string format_param(const char* name, double value) {
    std::ostringstream out;
    out.precision(6);
    out << name << "=" << value;
    return out.str();
}

}  // namespace

double rmse(std::span<const double> preds, std::span<const double> targets) {
    check_same_length(preds.size(), targets.size(), "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += (preds[i] - targets[i]) * (preds[i] - targets[i]);
    return std::sqrt(sum / static_cast<double>(preds.size()));
}

double misclass_rate(std::span<const double> scores, std::span<const double> labels) {
    check_same_length(scores.size(), labels.size(), "misclass_rate");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1.0 && labels[i] != -1.0) {
            throw InvalidInput("misclass_rate: label " + std::to_string(labels[i]) + " is not -1 or +1");
        }
        const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
        if (predicted != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double evaluate_metric(Metric metric, std::span<const double> preds, std::span<const double> targets) {
    return metric == Metric::rmse ? rmse(preds, targets) : misclass_rate(preds, targets);
}

Split split_dataset(const Dataset& data, std::array<double, 3> ratios, std::uint64_t seed) {
    for (double r : ratios) {
        if (!(r > 0.0)) throw InvalidInput("split: ratios must be positive");
    }
    if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw InvalidInput("split: ratios must sum to 1");
    const std::size_t n = data.size();
    const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios[1] * static_cast<double>(n) + 1e-9));
    if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
        throw InvalidInput("split: " + std::to_string(n) + " rows leave an empty part");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::span<const std::size_t> all(order);
    return Split{data.subset(all.subspan(0, n_train)), data.subset(all.subspan(n_train, n_val)),
                 data.subset(all.subspan(n_train + n_val))};
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> linspace(double first, double last, std::size_t count) {
    if (count == 0) return {};
    if (count == 1) return {first};
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    out.back() = last;
    return out;
}

std::vector<double> logspace(double first, double last, std::size_t count) {
    if (!(first > 0.0 && last > 0.0)) throw InvalidInput("logspace: endpoints must be positive");
    std::vector<double> out = linspace(std::log10(first), std::log10(last), count);
    for (double& v : out) v = std::pow(10.0, v);
    if (!out.empty()) {
        out.front() = first;
        out.back() = last;
    }
    return out;
}

TuningGrid TuningGrid::standard(int k_max) {
    return TuningGrid{linspace(0.01, 1.0, 20), linspace(0.01, 1.0, 20), logspace(1.0, 1e6, 20), {0.5, 1.0, 2.0, 4.0},
                      k_max};
}

std::string_view method_name(Method method) {
    switch (method) {
        case Method::boosting: return "Boosting";
        case Method::rs_boosting: return "RSboosting";
        case Method::rt_boosting: return "RTboosting";
        case Method::r_boosting: return "RBoosting";
        case Method::eps_boosting: return "eps-boosting";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (method_name(m) == name) return m;
    }
    throw InvalidInput("unknown method '" + std::string(name) + "'");
}

std::vector<GridCell> grid_cells(Method method, const TuningGrid& grid) {
    std::vector<GridCell> cells;
    switch (method) {
        case Method::boosting: cells.push_back({variant::Plain{}, "-"}); break;
        case Method::rs_boosting:
            for (double nu : grid.nu) cells.push_back({variant::Shrunk{nu}, format_param("nu", nu)});
            break;
        case Method::rt_boosting:
            for (double t0 : grid.t0) cells.push_back({variant::Truncated{t0, 2.0 / 3.0}, format_param("t0", t0)});
            break;
        case Method::r_boosting:
            for (double u : grid.u) {
                cells.push_back({variant::Rescale{ShrinkageSchedule::experimental(u)}, format_param("u", u)});
            }
            break;
        case Method::eps_boosting:
            for (double eps : grid.eps) cells.push_back({variant::Epsilon{eps}, format_param("eps", eps)});
            break;
    }
    return cells;
}

std::vector<double> validation_path(const Dataset& train, const Dataset& validation, const TrainConfig& config,
                                    Metric metric) {
    if (validation.dim() != train.dim()) throw InvalidInput("validation set has a different feature count");
    const Matrix& vx = validation.features();
    std::vector<double> preds(validation.size(), config.intercept);
    std::vector<double> path;
    path.reserve(static_cast<std::size_t>(config.max_iterations));
    TrainConfig quiet = config;
    quiet.record_trace = false;
    rboost::train(train, quiet, 0, [&](const IterationEvent& ev) {
        const double keep = 1.0 - ev.alpha;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            preds[i] = keep * preds[i] + ev.beta * evaluate_learner(ev.learner, vx.row(i));
        }
        path.push_back(evaluate_metric(metric, preds, validation.targets()));
    });
    return path;
}

TuneResult tune_cells(const Dataset& train, const Dataset& validation, std::span<const GridCell> cells, int k_max,
                      const TuneSettings& settings) {
    if (cells.empty()) throw InvalidInput("tune: empty grid");
    if (k_max < 1) throw InvalidInput("tune: k_max must be >= 1");

    struct CellOutcome {
        std::vector<double> path;
        std::string error;
    };
    std::vector<CellOutcome> outcomes(cells.size());
    parallel_for(cells.size(), [&](std::size_t c) {
        TrainConfig config{k_max, settings.loss, settings.learner, cells[c].variant, false, 0.0};
        try {
            outcomes[c].path = validation_path(train, validation, config, settings.metric);
        } catch (const std::exception& e) {
            outcomes[c].error = e.what();
        }
    });

    TuneResult best;
    bool found = false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!outcomes[c].error.empty() || outcomes[c].path.empty()) {
            best.failures.push_back(cells[c].params + ": " +
                                    (outcomes[c].error.empty() ? "no iterations" : outcomes[c].error));
            continue;
        }
        const auto& path = outcomes[c].path;
        for (std::size_t k = 0; k < path.size(); ++k) {
            const int kk = static_cast<int>(k) + 1;
            if (!found || path[k] < best.best_metric || (path[k] == best.best_metric && kk < best.best_k)) {
                found = true;
                best.cell = cells[c];
                best.cell_index = c;
                best.best_k = kk;
                best.best_metric = path[k];
            }
        }
    }
    if (!found) throw TuningError("tune: every grid cell failed");
    return best;
}

TuneResult tune(const Dataset& train, const Dataset& validation, Method method, const TuningGrid& grid,
                const TuneSettings& settings) {
    const auto cells = grid_cells(method, grid);
    return tune_cells(train, validation, cells, grid.k_max, settings);
}

const MethodReport& ExperimentReport::at(Method method) const {
    for (const auto& m : methods) {
        if (m.method == method) return m;
    }
    throw InvalidInput("report has no row for " + std::string(method_name(method)));
}

void summarize(MethodReport& report) {
    const std::size_t n = report.metrics.size();
    report.runs = n;
    if (n == 0) {
        report.mean = std::numeric_limits<double>::quiet_NaN();
        report.std_error = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    std::vector<double> sorted = report.metrics;
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    report.mean = mean;
    report.std_error = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n)) : 0.0;
}

ExperimentReport repeat_experiment(const ExperimentSpec& spec, std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw InvalidInput("repeat_experiment: runs must be >= 1");
    ExperimentReport report;
    report.seeds.assign(seeds.begin(), seeds.end());
    for (Method m : spec.methods) {
        MethodReport row;
        row.method = m;
        report.methods.push_back(std::move(row));
    }

    for (std::uint64_t seed : seeds) {
        std::optional<Split> split;
        try {
            split.emplace(spec.make_data(seed));
        } catch (const std::exception&) {
            for (auto& m : report.methods) ++m.failed_runs;
            continue;
        }
        for (auto& row : report.methods) {
            try {
                const TuneResult tuned = tune(split->train, split->validation, row.method, spec.grid, spec.settings);
                const TrainConfig config{tuned.best_k, spec.settings.loss, spec.settings.learner, tuned.cell.variant,
                                         false, 0.0};
                const TrainResult fitted = train(split->train, config, seed);
                const auto preds = predict(fitted.model, split->test.features());
                row.metrics.push_back(evaluate_metric(spec.settings.metric, preds, split->test.targets()));
                row.params.push_back(tuned.cell.params);
                row.ks.push_back(tuned.best_k);
            } catch (const std::exception&) {
                ++row.failed_runs;
            }
        }
    }
    for (auto& row : report.methods) summarize(row);
    return report;
}

ExperimentReport repeat_experiment(const ExperimentSpec& spec, int runs, std::uint64_t base_seed) {
    if (runs < 1) throw InvalidInput("repeat_experiment: runs must be >= 1");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(runs));
    std::iota(seeds.begin(), seeds.end(), base_seed);
    return repeat_experiment(spec, seeds);
}

double convergence_slope(std::span<const double> excess, int k_lo, int k_hi) {
    if (k_lo < 1 || k_hi <= k_lo || static_cast<std::size_t>(k_hi) > excess.size()) {
        throw InvalidInput("convergence_slope: need 1 <= k_lo < k_hi <= length");
    }
    if (k_hi - k_lo + 1 < 3) throw InvalidInput("convergence_slope: need at least 3 points");
    double sx = 0.0;
    double sy = 0.0;
    const auto n = static_cast<double>(k_hi - k_lo + 1);
    for (int k = k_lo; k <= k_hi; ++k) {
        sx += std::log(static_cast<double>(k));
        sy += std::log(std::max(excess[static_cast<std::size_t>(k - 1)], 1e-300));
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double dx = std::log(static_cast<double>(k)) - mx;
        const double dy = std::log(std::max(excess[static_cast<std::size_t>(k - 1)], 1e-300)) - my;
        sxy += dx * dy;
        sxx += dx * dx;
    }
    return sxy / sxx;
}

Simulation parse_simulation(std::string_view name) {
    if (name == "m1") return Simulation::m1;
    if (name == "m2") return Simulation::m2;
    if (name == "orange") return Simulation::orange;
    throw InvalidInput("unknown experiment '" + std::string(name) + "'");
}

int default_k_max(Simulation sim) { return sim == Simulation::orange ? 1000 : 500; }

ExperimentSpec simulation_spec(Simulation sim, double noise, int k_max) {
    ExperimentSpec spec;
    spec.grid = TuningGrid::standard(k_max);
    switch (sim) {
        case Simulation::m1:
        case Simulation::m2: {
            if (!(noise >= 0.0)) throw InvalidInput("simulate: sigma must be >= 0");
            spec.settings = TuneSettings{LossKind::squared, learner::Tree{4}, Metric::rmse};
            spec.make_data = [sim, noise](std::uint64_t seed) {
                auto gen = [&](std::size_t n, SampleRole role, std::uint64_t stream) {
                    const std::uint64_t s = derive_seed(seed, stream);
                    return sim == Simulation::m1 ? gen_regression(M1Spec{n, noise}, role, s)
                                                 : gen_regression(M2Spec{n, noise, 10}, role, s);
                };
                return Split{gen(500, SampleRole::train, 0), gen(500, SampleRole::validation, 1),
                             gen(1000, SampleRole::test_noiseless, 2)};
            };
            break;
        }
        case Simulation::orange: {
            if (!(noise >= 0.0) || noise != std::floor(noise)) {
                throw InvalidInput("simulate: q must be a non-negative integer");
            }
            const auto q = static_cast<std::size_t>(noise);
            spec.settings = TuneSettings{LossKind::logistic, learner::Stump{}, Metric::misclassification};
            spec.make_data = [q](std::uint64_t seed) {
                return Split{gen_orange(100, q, derive_seed(seed, 0)), gen_orange(100, q, derive_seed(seed, 1)),
                             gen_orange(2000, q, derive_seed(seed, 2))};
            };
            break;
        }
    }
    return spec;
}

ExperimentSpec bench_spec(Dataset data, int k_max) {
    ExperimentSpec spec;
    spec.grid = TuningGrid::standard(k_max);
    const bool classification = data.task() == Task::binary_classification;
    spec.settings = classification ? TuneSettings{LossKind::logistic, learner::Stump{}, Metric::misclassification}
                                   : TuneSettings{LossKind::squared, learner::Stump{}, Metric::rmse};
    spec.make_data = [shared = std::make_shared<const Dataset>(std::move(data))](std::uint64_t seed) {
        return split_dataset(*shared, {0.5, 0.25, 0.25}, seed);
    };
    return spec;
}

}  // namespace rboost
