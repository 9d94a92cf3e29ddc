#include "rboost/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rboost/error.hpp"

namespace rboost {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const double> base, std::span<const double> gvals, std::span<const double> targets) {
    if (base.size() != gvals.size() || base.size() != targets.size()) {
        throw InvalidInput("line search: length mismatch");
    }
    if (base.empty()) throw InvalidInput("line search: empty sample");
    if (std::all_of(gvals.begin(), gvals.end(), [](double g) { return g == 0.0; })) {
        throw DegenerateDirection("line search: direction is zero on every sample");
    }
}

// Q(beta) and Q'(beta) along base + beta g. An exponential-loss overflow
// maps to +inf risk; the slope then takes the sign pointing back toward the
// finite region, which is what convexity implies.
class Ray {
public:
    Ray(LossKind kind, std::span<const double> base, std::span<const double> g, std::span<const double> y)
        : kind_(kind), base_(base), g_(g), y_(y) {}

    double risk(double beta) const {
        double sum = 0.0;
        try {
            for (std::size_t i = 0; i < base_.size(); ++i) sum += loss_value(kind_, base_[i] + beta * g_[i], y_[i]);
        } catch (const LossOverflow&) {
            return kInf;
        }
        return sum / static_cast<double>(base_.size());
    }

    double slope(double beta) const {
        double sum = 0.0;
        try {
            for (std::size_t i = 0; i < base_.size(); ++i) {
                if (g_[i] != 0.0) sum += loss_derivative(kind_, base_[i] + beta * g_[i], y_[i]) * g_[i];
            }
        } catch (const LossOverflow&) {
            return beta > 0.0 ? kInf : -kInf;
        }
        return sum / static_cast<double>(base_.size());
    }

private:
    LossKind kind_;
    std::span<const double> base_;
    std::span<const double> g_;
    std::span<const double> y_;
};

double golden_section(const Ray& ray, double lo, double hi, double tolerance) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = ray.risk(c);
    double fd = ray.risk(d);
    for (int iter = 0; iter < 400; ++iter) {
        const double width = hi - lo;
        if (width <= tolerance * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
        const double scale = std::max({std::abs(fc), std::abs(fd), std::numeric_limits<double>::min()});
        if (std::isfinite(fc) && std::isfinite(fd) && std::abs(fc - fd) <= 8 * std::numeric_limits<double>::epsilon() * scale) {
            // Values agree to rounding; the slope sign still resolves the side.
            const double mid = 0.5 * (c + d);
            if (ray.slope(mid) > 0.0) {
                hi = mid;
            } else {
                lo = mid;
            }
            c = hi - inv_phi * (hi - lo);
            d = lo + inv_phi * (hi - lo);
            fc = ray.risk(c);
            fd = ray.risk(d);
        } else if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = ray.risk(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = ray.risk(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double line_search_l2(std::span<const double> base, std::span<const double> gvals, std::span<const double> targets) {
    check_inputs(base, gvals, targets);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        num += gvals[i] * (targets[i] - base[i]);
        den += gvals[i] * gvals[i];
    }
    return num / den;
}

double line_search(LossKind kind, std::span<const double> base, std::span<const double> gvals,
                   std::span<const double> targets, const LineSearchOptions& opts) {
    if (!(opts.tolerance > 0.0)) throw InvalidInput("line search: tolerance must be positive");
    if (opts.bound && !(*opts.bound > 0.0)) throw InvalidInput("line search: bound must be positive");
    check_inputs(base, gvals, targets);
    const Ray ray(kind, base, gvals, targets);

    double lo = -1.0;
    double hi = 1.0;
    if (opts.bound) {
        const double t = *opts.bound;
        if (ray.slope(t) <= 0.0) return t;
        if (ray.slope(-t) >= 0.0) return -t;
        lo = -t;
        hi = t;
    } else {
        // All margins share a sign along g: no finite minimizer.
        if (kind != LossKind::squared) {
            bool all_up = true;
            bool all_down = true;
            for (std::size_t i = 0; i < gvals.size(); ++i) {
                const double m = targets[i] * gvals[i];
                if (m < 0.0) all_up = false;
                if (m > 0.0) all_down = false;
            }
            const double edge = std::ldexp(1.0, opts.max_expansions);
            if (all_up) throw UnboundedDescent("line search: risk decreases without bound", edge);
            if (all_down) throw UnboundedDescent("line search: risk decreases without bound", -edge);
        }
        int expansions = 0;
        while (ray.slope(hi) < 0.0) {
            if (expansions++ >= opts.max_expansions) {
                throw UnboundedDescent("line search: risk still decreasing at beta = " + std::to_string(hi), hi);
            }
            lo = hi;
            hi *= 2.0;
        }
        while (ray.slope(lo) > 0.0) {
            if (expansions++ >= opts.max_expansions) {
                throw UnboundedDescent("line search: risk still decreasing at beta = " + std::to_string(lo), lo);
            }
            hi = lo;
            lo *= 2.0;
        }
    }

    const double beta = golden_section(ray, lo, hi, opts.tolerance);
    // Zero is always feasible; never return a step that is worse.
    if (ray.risk(beta) > ray.risk(0.0)) return 0.0;
    return beta;
}

}  // namespace rboost
