#include "rboost/loss.hpp"

#include <cmath>
#include <string>

#include "rboost/error.hpp"

namespace rboost {

namespace {

// exp() overflows past this argument.
constexpr double kMaxExpArg = 709.78;

void check_label(LossKind kind, double y) {
    if (kind != LossKind::squared && y != 1.0 && y != -1.0) {
        throw InvalidInput(std::string(to_string(kind)) + " loss: label " + std::to_string(y) + " is not -1 or +1");
    }
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw InvalidInput(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

// ln(1 + e^z) without overflow.
double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double checked_exp(double z) {
    if (z > kMaxExpArg) throw LossOverflow("exponential loss: exp(" + std::to_string(z) + ") overflows");
    return std::exp(z);
}

}  // namespace

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::squared: return "squared";
        case LossKind::logistic: return "logistic";
        case LossKind::exponential: return "exponential";
    }
    return "unknown";
}

LossKind parse_loss(std::string_view name) {
    if (name == "squared" || name == "l2") return LossKind::squared;
    if (name == "logistic") return LossKind::logistic;
    if (name == "exponential") return LossKind::exponential;
    throw InvalidInput("unknown loss '" + std::string(name) + "'");
}

bool is_classification_loss(LossKind kind) { return kind != LossKind::squared; }

double loss_value(LossKind kind, double f, double y) {
    check_label(kind, y);
    switch (kind) {
        case LossKind::squared: return (f - y) * (f - y);
        case LossKind::logistic: return softplus(-y * f);
        case LossKind::exponential: return checked_exp(-y * f);
    }
    return 0.0;
}

double loss_derivative(LossKind kind, double f, double y) {
    check_label(kind, y);
    switch (kind) {
        case LossKind::squared: return 2.0 * (f - y);
        case LossKind::logistic: {
            // -y / (1 + e^{yf}), evaluated on the side that cannot overflow.
            const double z = y * f;
            if (z >= 0.0) {
                const double e = std::exp(-z);
                return -y * e / (1.0 + e);
            }
            return -y / (1.0 + std::exp(z));
        }
        case LossKind::exponential: return -y * checked_exp(-y * f);
    }
    return 0.0;
}

double empirical_risk(LossKind kind, std::span<const double> preds, std::span<const double> targets) {
    check_lengths(preds.size(), targets.size(), "empirical_risk");
    if (preds.empty()) throw InvalidInput("empirical_risk: empty sample");
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += loss_value(kind, preds[i], targets[i]);
    return sum / static_cast<double>(preds.size());
}

double neg_gradient_inner(LossKind kind, std::span<const double> preds, std::span<const double> targets,
                          std::span<const double> gvals) {
    check_lengths(preds.size(), targets.size(), "neg_gradient_inner");
    check_lengths(preds.size(), gvals.size(), "neg_gradient_inner");
    if (preds.empty()) throw InvalidInput("neg_gradient_inner: empty sample");
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (gvals[i] != 0.0) sum += loss_derivative(kind, preds[i], targets[i]) * gvals[i];
    }
    return -sum / static_cast<double>(preds.size());
}

std::vector<double> pseudo_residuals(LossKind kind, std::span<const double> preds, std::span<const double> targets) {
    check_lengths(preds.size(), targets.size(), "pseudo_residuals");
    std::vector<double> u(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) u[i] = -loss_derivative(kind, preds[i], targets[i]);
    return u;
}

}  // namespace rboost
