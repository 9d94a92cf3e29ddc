#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rboost/dataset.hpp"
#include "rboost/learners.hpp"
#include "rboost/loss.hpp"
#include "rboost/model.hpp"

namespace rboost {

/// alpha_k = c4 / (c5 k + c6)
struct ShrinkageSchedule {
    double c4 = 3.0;
    double c5 = 1.0;
    double c6 = 3.0;

    /// 3 / (k + 3)
    static ShrinkageSchedule theorem() { return {3.0, 1.0, 3.0}; }
    /// 2 / (k + u), the family tuned in experiments.
    static ShrinkageSchedule experimental(double u) { return {2.0, 1.0, u}; }
    /// alpha == 0 everywhere (re-scale boosting then coincides with plain boosting).
    static ShrinkageSchedule none() { return {0.0, 1.0, 1.0}; }

    friend bool operator==(const ShrinkageSchedule&, const ShrinkageSchedule&) = default;
};

/// Shrinkage degree at iteration k >= 1; throws InvalidSchedule outside [0, 1).
double alpha_at(const ShrinkageSchedule& schedule, int k);

namespace variant {
struct Plain {};
struct Rescale {
    ShrinkageSchedule schedule = ShrinkageSchedule::theorem();
};
struct Shrunk {
    double nu = 0.1;
};
/// Line search restricted to |beta| <= t0 * k^(-exponent).
struct Truncated {
    double t0 = 1.0;
    double exponent = 2.0 / 3.0;
};
struct Epsilon {
    double eps = 0.1;
};
}  // namespace variant

using VariantSpec = std::variant<variant::Plain, variant::Rescale, variant::Shrunk, variant::Truncated, variant::Epsilon>;

/// Throws InvalidInput when a variant parameter is out of range.
void validate(const VariantSpec& spec);
std::string describe(const VariantSpec& spec);

namespace learner {
struct Stump {};
struct Tree {
    int splits = 4;
};
/// Finite dictionary; the projection-of-gradient step picks the atom with the
/// largest |-Q_m'(f, g)| exactly instead of fitting pseudo-residuals.
struct Dictionary {
    std::vector<WeakLearner> atoms;
};
}  // namespace learner

using LearnerSpec = std::variant<learner::Stump, learner::Tree, learner::Dictionary>;

struct TrainConfig {
    int max_iterations = 100;
    LossKind loss = LossKind::squared;
    LearnerSpec learner = learner::Stump{};
    VariantSpec variant = variant::Plain{};
    bool record_trace = true;
    /// f_0 is this constant (zero unless an intercept is requested).
    double intercept = 0.0;
};

struct TraceRecord {
    int k = 0;
    std::string learner;
    double beta = 0.0;
    double alpha = 0.0;
    double empirical_risk = 0.0;
    /// Line search reported unbounded descent and beta was capped at the bracket edge.
    bool capped = false;
};

struct TrainTrace {
    std::vector<TraceRecord> records;
};

enum class StopReason { completed, degenerate_direction };

struct TrainResult {
    EnsembleModel model;
    TrainTrace trace;
    StopReason stop = StopReason::completed;
};

/// Called after each completed iteration k with the step f_k = (1 - alpha) f_{k-1} + beta g.
struct IterationEvent {
    int k;
    double alpha;
    double beta;
    const WeakLearner& learner;
    double empirical_risk;
};
using IterationObserver = std::function<void(const IterationEvent&)>;

/// Runs up to config.max_iterations boosting steps of the configured variant.
/// The step producing f_k uses alpha_k, so f_1 from f_0 uses alpha_1.
TrainResult train(const Dataset& data, const TrainConfig& config, std::uint64_t seed,
                  const IterationObserver& observer = {});

/// Q_m(f_k) - reference for every recorded iteration.
std::vector<double> excess_risk_trace(const TrainTrace& trace, double reference);

}  // namespace rboost
