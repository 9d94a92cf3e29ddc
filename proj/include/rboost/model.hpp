#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rboost/dataset.hpp"
#include "rboost/learners.hpp"

namespace rboost {

struct Term {
    double coefficient = 0.0;
    WeakLearner learner;

    friend bool operator==(const Term&, const Term&) = default;
};

/// Additive model f(x) = s * (intercept + sum_j c_j g_j(x)).
///
/// The global scale s absorbs every re-scale step in O(1): rescaling by
/// (1 - alpha) multiplies s and leaves the stored c_j untouched, and a term
/// added with resolved coefficient beta is stored as beta / s. The resolved
/// coefficient of term j is therefore s * c_j.
class EnsembleModel {
public:
    EnsembleModel() = default;
    explicit EnsembleModel(std::size_t feature_count, double intercept = 0.0);

    std::size_t feature_count() const noexcept { return feature_count_; }
    double global_scale() const noexcept { return scale_; }
    /// Stored (unscaled) intercept and terms.
    double stored_intercept() const noexcept { return intercept_; }
    std::span<const Term> stored_terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

    double resolved_intercept() const noexcept { return scale_ * intercept_; }
    double resolved_coefficient(std::size_t j) const { return scale_ * terms_.at(j).coefficient; }

    /// f <- (1 - alpha) f, requires 0 <= alpha < 1.
    void rescale(double alpha);
    /// f <- f + coefficient * learner.
    void add_term(double coefficient, WeakLearner learner);

    double predict_row(std::span<const double> x) const;

    friend bool operator==(const EnsembleModel&, const EnsembleModel&) = default;

private:
    void fold_scale();

    std::size_t feature_count_ = 0;
    double intercept_ = 0.0;
    double scale_ = 1.0;
    std::vector<Term> terms_;
};

/// Global scale below which the model folds it into the stored coefficients.
inline constexpr double kScaleFloor = 1e-300;

/// f(x) for every row. Throws InvalidInput on a column-count mismatch.
std::vector<double> predict(const EnsembleModel& model, const Matrix& features);

/// Copy of `model` with f replaced by (1 - alpha) f.
EnsembleModel rescale(EnsembleModel model, double alpha);

/// Fully resolved coefficients c_j = beta_j * prod_{i>j} (1 - alpha_i).
std::vector<Term> materialize(const EnsembleModel& model);

/// Model with global scale 1 holding exactly the given resolved terms.
EnsembleModel from_terms(std::size_t feature_count, double intercept, std::vector<Term> terms);

/// pi_M: clamp each value into [-M, M] keeping its sign.
std::vector<double> truncate_predictions(std::span<const double> preds, double level);

}  // namespace rboost
