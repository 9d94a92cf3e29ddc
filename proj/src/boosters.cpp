#include "rboost/boosters.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "rboost/error.hpp"
#include "rboost/linesearch.hpp"

namespace rboost {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate_config(const Dataset& data, const TrainConfig& config) {
    if (config.max_iterations < 1) throw InvalidInput("train: max_iterations must be >= 1");
    if (is_classification_loss(config.loss) && data.task() != Task::binary_classification) {
        throw InvalidInput("train: " + std::string(to_string(config.loss)) + " loss needs a classification dataset");
    }
    validate(config.variant);
    std::visit(overloaded{[](const learner::Stump&) {},
                          [](const learner::Tree& t) {
                              if (t.splits < 1) throw InvalidInput("train: tree needs at least one split");
                          },
                          [&](const learner::Dictionary& d) {
                              if (d.atoms.empty()) throw InvalidInput("train: empty dictionary");
                              for (const auto& atom : d.atoms) {
                                  if (atom.required_features() > data.dim()) {
                                      throw InvalidInput("train: dictionary atom needs more features than the data has");
                                  }
                              }
                          }},
               config.learner);
}

// Projection-of-gradient step: the learner and its values on the sample.
class Projector {
public:
    Projector(const Dataset& data, const LearnerSpec& spec) : data_(data), spec_(spec) {
        if (const auto* dict = std::get_if<learner::Dictionary>(&spec_)) {
            atom_values_.reserve(dict->atoms.size());
            for (const auto& atom : dict->atoms) atom_values_.push_back(evaluate_learner(atom, data.features()));
        } else {
            sorted_.emplace(data.features());
        }
    }

    // Fits (or selects) g for the pseudo-residuals and fills `gvals`.
    WeakLearner project(std::span<const double> residuals, std::vector<double>& gvals) const {
        const Matrix& x = data_.features();
        gvals.resize(x.rows());
        if (std::holds_alternative<learner::Stump>(spec_)) {
            const DecisionStump stump = fit_stump(x, *sorted_, residuals);
            for (std::size_t i = 0; i < x.rows(); ++i) gvals[i] = stump(x.row(i));
            return WeakLearner{stump, std::nullopt};
        }
        if (const auto* tree_spec = std::get_if<learner::Tree>(&spec_)) {
            RegressionTree tree = fit_tree(x, *sorted_, residuals, tree_spec->splits);
            for (std::size_t i = 0; i < x.rows(); ++i) gvals[i] = tree(x.row(i));
            return WeakLearner{std::move(tree), std::nullopt};
        }
        // sup over S and -S of the directional derivative; lowest index wins ties.
        const auto& atoms = std::get<learner::Dictionary>(spec_).atoms;
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            double inner = 0.0;
            const auto& g = atom_values_[j];
            for (std::size_t i = 0; i < g.size(); ++i) inner += residuals[i] * g[i];
            if (std::abs(inner) > best_score) {
                best_score = std::abs(inner);
                best = j;
            }
        }
        gvals = atom_values_[best];
        return atoms[best];
    }

private:
    const Dataset& data_;
    const LearnerSpec& spec_;
    std::optional<SortedColumns> sorted_;
    std::vector<std::vector<double>> atom_values_;
};

struct Step {
    double beta = 0.0;
    bool capped = false;
};

// Line search from `base` along g, optionally restricted to [-bound, bound].
// Unbounded descent is capped at the last bracket edge.
Step search(LossKind loss, std::span<const double> base, std::span<const double> gvals,
            std::span<const double> targets, std::optional<double> bound) {
    if (loss == LossKind::squared) {
        const double beta = line_search_l2(base, gvals, targets);
        return {bound ? std::clamp(beta, -*bound, *bound) : beta, false};
    }
    LineSearchOptions opts;
    opts.bound = bound;
    try {
        return {line_search(loss, base, gvals, targets, opts), false};
    } catch (const UnboundedDescent& e) {
        return {e.edge(), true};
    }
}

}  // namespace

double alpha_at(const ShrinkageSchedule& schedule, int k) {
    if (k < 1) throw InvalidInput("alpha_at: iteration must be >= 1, got " + std::to_string(k));
    const double alpha = schedule.c4 / (schedule.c5 * k + schedule.c6);
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw InvalidSchedule("shrinkage degree " + std::to_string(alpha) + " at k=" + std::to_string(k) +
                              " is outside [0, 1)");
    }
    return alpha;
}

void validate(const VariantSpec& spec) {
    std::visit(overloaded{[](const variant::Plain&) {},
                          [](const variant::Rescale& r) {
                              const auto& s = r.schedule;
                              if (!(s.c4 >= 0.0 && s.c5 >= 0.0)) {
                                  throw InvalidSchedule("schedule needs c4 >= 0 and c5 >= 0");
                              }
                              // Non-increasing in k, so checking k = 1 covers every k.
                              alpha_at(s, 1);
                          },
                          [](const variant::Shrunk& s) {
                              if (!(s.nu > 0.0 && s.nu <= 1.0)) throw InvalidInput("shrunk: nu must lie in (0, 1]");
                          },
                          [](const variant::Truncated& t) {
                              if (!(t.t0 > 0.0)) throw InvalidInput("truncated: t0 must be positive");
                              if (!(t.exponent >= 0.0)) throw InvalidInput("truncated: exponent must be >= 0");
                          },
                          [](const variant::Epsilon& e) {
                              if (!(e.eps > 0.0)) throw InvalidInput("epsilon: eps must be positive");
                          }},
               spec);
}

std::string describe(const VariantSpec& spec) {
    std::ostringstream out;
    out.precision(6);
    std::visit(overloaded{[&](const variant::Plain&) { out << "plain"; },
                          [&](const variant::Rescale& r) {
                              out << "rescale:c4=" << r.schedule.c4 << ",c5=" << r.schedule.c5
                                  << ",c6=" << r.schedule.c6;
                          },
                          [&](const variant::Shrunk& s) { out << "shrunk:nu=" << s.nu; },
                          [&](const variant::Truncated& t) {
                              out << "truncated:t0=" << t.t0 << ",exponent=" << t.exponent;
                          },
                          [&](const variant::Epsilon& e) { out << "epsilon:eps=" << e.eps; }},
               spec);
    return out.str();
}

TrainResult train(const Dataset& data, const TrainConfig& config, std::uint64_t /*seed*/,
                  const IterationObserver& observer) {
    // Training is deterministic; the seed is carried for provenance only.
    validate_config(data, config);
    const std::span<const double> y = data.targets();
    const std::size_t m = data.size();

    TrainResult result{EnsembleModel(data.dim(), config.intercept), {}, StopReason::completed};
    const Projector projector(data, config.learner);
    std::vector<double> preds(m, config.intercept);
    std::vector<double> base(m);
    std::vector<double> gvals;

    for (int k = 1; k <= config.max_iterations; ++k) {
        const std::vector<double> residuals = pseudo_residuals(config.loss, preds, y);
        WeakLearner g = projector.project(residuals, gvals);
        if (std::all_of(gvals.begin(), gvals.end(), [](double v) { return v == 0.0; })) {
            result.stop = StopReason::degenerate_direction;
            break;
        }

        double alpha = 0.0;
        if (const auto* r = std::get_if<variant::Rescale>(&config.variant)) alpha = alpha_at(r->schedule, k);
        const double keep = 1.0 - alpha;
        for (std::size_t i = 0; i < m; ++i) base[i] = keep * preds[i];

        Step step = std::visit(
            overloaded{
                [&](const variant::Plain&) { return search(config.loss, base, gvals, y, std::nullopt); },
                [&](const variant::Rescale&) { return search(config.loss, base, gvals, y, std::nullopt); },
                [&](const variant::Shrunk& s) {
                    Step full = search(config.loss, base, gvals, y, std::nullopt);
                    full.beta *= s.nu;
                    return full;
                },
                [&](const variant::Truncated& t) {
                    const double bound = t.t0 * std::pow(static_cast<double>(k), -t.exponent);
                    return search(config.loss, base, gvals, y, bound);
                },
                [&](const variant::Epsilon& e) {
                    const double inner = neg_gradient_inner(config.loss, preds, y, gvals);
                    return Step{inner >= 0.0 ? e.eps : -e.eps, false};
                }},
            config.variant);

        for (std::size_t i = 0; i < m; ++i) preds[i] = base[i] + step.beta * gvals[i];
        const double risk = empirical_risk(config.loss, preds, y);

        if (observer) observer(IterationEvent{k, alpha, step.beta, g, risk});
        if (config.record_trace) {
            result.trace.records.push_back(TraceRecord{k, g.summary(), step.beta, alpha, risk, step.capped});
        }
        result.model.rescale(alpha);
        result.model.add_term(step.beta, std::move(g));
    }
    return result;
}

std::vector<double> excess_risk_trace(const TrainTrace& trace, double reference) {
    std::vector<double> out;
    out.reserve(trace.records.size());
    for (const auto& r : trace.records) out.push_back(r.empirical_risk - reference);
    return out;
}

}  // namespace rboost
