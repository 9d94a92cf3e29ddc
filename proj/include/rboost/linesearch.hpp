#pragma once

#include <optional>
#include <span>

#include "rboost/loss.hpp"

namespace rboost {

struct LineSearchOptions {
    /// Target width of the final bracket on beta (relative once |beta| > 1).
    double tolerance = 1e-10;
    /// Doublings allowed when growing the initial [-1, 1] bracket.
    int max_expansions = 60;
    /// Restrict beta to [-bound, bound].
    std::optional<double> bound;
};

/// Exact minimizer of beta -> mean((y - base - beta g)^2).
/// Throws DegenerateDirection when g is zero on every sample.
double line_search_l2(std::span<const double> base, std::span<const double> gvals, std::span<const double> targets);

/// Minimizer of the convex map beta -> Q_m(base + beta g).
///
/// Grows [-1, 1] by doubling until the directional derivative changes sign,
/// then runs golden-section search on the bracket. With `opts.bound` the
/// result is the minimizer over [-bound, bound]. Throws UnboundedDescent when
/// the derivative keeps its sign for `max_expansions` doublings.
double line_search(LossKind kind, std::span<const double> base, std::span<const double> gvals,
                   std::span<const double> targets, const LineSearchOptions& opts = {});

}  // namespace rboost
