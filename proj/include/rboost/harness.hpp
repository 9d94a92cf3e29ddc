#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rboost/boosters.hpp"
#include "rboost/dataset.hpp"

namespace rboost {

class TuningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Metric { rmse, misclassification };

double rmse(std::span<const double> preds, std::span<const double> targets);

/// Fraction of samples with sign(score) != label, where sign(0) counts as +1.
double misclass_rate(std::span<const double> scores, std::span<const double> labels);

double evaluate_metric(Metric metric, std::span<const double> preds, std::span<const double> targets);

struct Split {
    Dataset train;
    Dataset validation;
    Dataset test;
};

/// Seeded uniform permutation cut into contiguous train/validation/test parts.
/// Part sizes are floor(ratio * n) for train and validation, the rest for test.
Split split_dataset(const Dataset& data, std::array<double, 3> ratios, std::uint64_t seed);

/// Independent stream seed derived from a base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

std::vector<double> linspace(double first, double last, std::size_t count);
/// Log-spaced on [first, last] with both endpoints exact.
std::vector<double> logspace(double first, double last, std::size_t count);

struct TuningGrid {
    std::vector<double> nu;
    std::vector<double> eps;
    std::vector<double> u;
    std::vector<double> t0;
    int k_max = 500;

    /// 20-point nu/eps grids on [0.01, 1], 20 log-spaced u on [1, 1e6], t0 in {0.5, 1, 2, 4}.
    static TuningGrid standard(int k_max);
};

enum class Method { boosting, rs_boosting, rt_boosting, r_boosting, eps_boosting };
inline constexpr std::array<Method, 5> kAllMethods{Method::boosting, Method::rs_boosting, Method::rt_boosting,
                                                   Method::r_boosting, Method::eps_boosting};

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct GridCell {
    VariantSpec variant;
    std::string params;
};

/// Grid cells of one method family, in grid order.
std::vector<GridCell> grid_cells(Method method, const TuningGrid& grid);

struct TuneSettings {
    LossKind loss = LossKind::squared;
    LearnerSpec learner = learner::Stump{};
    Metric metric = Metric::rmse;
};

struct TuneResult {
    GridCell cell;
    std::size_t cell_index = 0;
    int best_k = 0;
    double best_metric = 0.0;
    std::vector<std::string> failures;
};

/// Validation metric of f_1 .. f_K, evaluated along a single training run.
std::vector<double> validation_path(const Dataset& train, const Dataset& validation, const TrainConfig& config,
                                    Metric metric);

/// Trains every cell for k_max iterations and picks the (cell, k) with the
/// lowest validation metric; ties go to the smaller k, then the earlier cell.
/// Failing cells are skipped and listed in `failures`; throws TuningError when
/// every cell fails.
TuneResult tune_cells(const Dataset& train, const Dataset& validation, std::span<const GridCell> cells, int k_max,
                      const TuneSettings& settings);

TuneResult tune(const Dataset& train, const Dataset& validation, Method method, const TuningGrid& grid,
                const TuneSettings& settings);

struct ExperimentSpec {
    std::function<Split(std::uint64_t seed)> make_data;
    TuneSettings settings;
    TuningGrid grid;
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
};

struct MethodReport {
    Method method = Method::boosting;
    double mean = 0.0;
    /// Sample standard deviation / sqrt(runs); zero for a single run.
    double std_error = 0.0;
    std::vector<double> metrics;
    std::vector<std::string> params;
    std::vector<int> ks;
    /// Successful runs contributing to mean and std_error.
    std::size_t runs = 0;
    std::size_t failed_runs = 0;
};

struct ExperimentReport {
    std::vector<MethodReport> methods;
    std::vector<std::uint64_t> seeds;

    const MethodReport& at(Method method) const;
};

/// Fills runs, mean and std_error from `metrics`; the result does not depend on run order.
void summarize(MethodReport& report);

/// generate -> tune on validation -> retrain at the chosen k -> score on test,
/// for every method and every seed. Failed runs are counted and excluded.
ExperimentReport repeat_experiment(const ExperimentSpec& spec, std::span<const std::uint64_t> seeds);
/// Seeds base_seed, base_seed + 1, ..., base_seed + runs - 1.
ExperimentReport repeat_experiment(const ExperimentSpec& spec, int runs, std::uint64_t base_seed);

/// Least-squares slope of log(excess_k) against log(k) for k in [k_lo, k_hi]
/// (1-based). Entries are floored at 1e-300 before taking logs.
double convergence_slope(std::span<const double> excess, int k_lo, int k_hi);

enum class Simulation { m1, m2, orange };
Simulation parse_simulation(std::string_view name);

/// Toy-simulation protocol: m1/m2 use 500 train, 500 validation, 1000
/// noiseless test points with J = 4 trees under squared loss; orange uses 100
/// per class for training, 200 validation, 4000 test points with stumps under
/// logistic loss. `noise` is sigma for m1/m2 and the feature count q for orange.
ExperimentSpec simulation_spec(Simulation sim, double noise, int k_max);

/// Default iteration caps: 500 for toy regression, 1000 otherwise.
int default_k_max(Simulation sim);

/// Real-data protocol: 50/25/25 split per run, stumps, squared loss for
/// regression and logistic loss for classification.
ExperimentSpec bench_spec(Dataset data, int k_max);

}  // namespace rboost
