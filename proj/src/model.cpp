#include "rboost/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rboost/error.hpp"

namespace rboost {

EnsembleModel::EnsembleModel(std::size_t feature_count, double intercept)
    : feature_count_(feature_count), intercept_(intercept) {
    if (!std::isfinite(intercept)) throw InvalidInput("model: non-finite intercept");
}

void EnsembleModel::rescale(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw InvalidInput("rescale: alpha must lie in [0, 1), got " + std::to_string(alpha));
    }
    scale_ *= 1.0 - alpha;
    if (scale_ < kScaleFloor) fold_scale();
}

void EnsembleModel::add_term(double coefficient, WeakLearner learner) {
    if (!std::isfinite(coefficient)) throw InvalidInput("model: non-finite coefficient");
    if (learner.required_features() > feature_count_) {
        throw InvalidInput("model: learner needs " + std::to_string(learner.required_features()) +
                           " features, model has " + std::to_string(feature_count_));
    }
    terms_.push_back(Term{coefficient / scale_, std::move(learner)});
}

double EnsembleModel::predict_row(std::span<const double> x) const {
    double sum = intercept_;
    for (const Term& t : terms_) sum += t.coefficient * evaluate_learner(t.learner, x);
    return scale_ * sum;
}

void EnsembleModel::fold_scale() {
    intercept_ *= scale_;
    for (Term& t : terms_) t.coefficient *= scale_;
    scale_ = 1.0;
}

std::vector<double> predict(const EnsembleModel& model, const Matrix& features) {
    if (features.cols() != model.feature_count()) {
        throw InvalidInput("predict: expected " + std::to_string(model.feature_count()) + " features, got " +
                           std::to_string(features.cols()));
    }
    std::vector<double> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) out[i] = model.predict_row(features.row(i));
    return out;
}

EnsembleModel rescale(EnsembleModel model, double alpha) {
    model.rescale(alpha);
    return model;
}

std::vector<Term> materialize(const EnsembleModel& model) {
    std::vector<Term> out;
    out.reserve(model.size());
    for (std::size_t j = 0; j < model.size(); ++j) {
        out.push_back(Term{model.resolved_coefficient(j), model.stored_terms()[j].learner});
    }
    return out;
}

EnsembleModel from_terms(std::size_t feature_count, double intercept, std::vector<Term> terms) {
    EnsembleModel model(feature_count, intercept);
    for (Term& t : terms) model.add_term(t.coefficient, std::move(t.learner));
    return model;
}

std::vector<double> truncate_predictions(std::span<const double> preds, double level) {
    if (!(level > 0.0)) throw InvalidInput("truncate: level must be positive, got " + std::to_string(level));
    std::vector<double> out(preds.size());
    std::transform(preds.begin(), preds.end(), out.begin(),
                   [level](double v) { return std::clamp(v, -level, level); });
    return out;
}

}  // namespace rboost
