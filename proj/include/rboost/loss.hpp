#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace rboost {

/// squared: (f - y)^2, logistic: ln(1 + exp(-y f)), exponential: exp(-y f).
enum class LossKind { squared, logistic, exponential };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

/// True for the losses that require labels in {-1, +1}.
bool is_classification_loss(LossKind kind);

double loss_value(LossKind kind, double f, double y);
double loss_derivative(LossKind kind, double f, double y);

/// Q_m = mean of pointwise losses.
double empirical_risk(LossKind kind, std::span<const double> preds, std::span<const double> targets);

/// -Q_m'(f, g) = -(1/m) sum_i dphi(f_i, y_i) g_i.
double neg_gradient_inner(LossKind kind, std::span<const double> preds, std::span<const double> targets,
                          std::span<const double> gvals);

/// Per-sample negative gradient u_i = -dphi(f_i, y_i).
std::vector<double> pseudo_residuals(LossKind kind, std::span<const double> preds, std::span<const double> targets);

}  // namespace rboost
