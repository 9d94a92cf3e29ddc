#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rboost/dataset.hpp"
#include "rboost/learners.hpp"

namespace rboost {

/// Piecewise target: 10 sqrt(-x) sin(8 pi x) on [-2, 0), zero elsewhere.
double m1(double x);

/// Sine target on R^10: sum_j (-1)^(j-1) x_j sin(x_j^2).
double m2(std::span<const double> x);

struct M1Spec {
    std::size_t n = 500;
    double sigma = 0.0;
};

struct M2Spec {
    std::size_t n = 500;
    double sigma = 0.0;
    std::size_t d = 10;
};

enum class SampleRole { train, validation, test_noiseless };

/// X ~ U[-2, 2]^d, Y = m(X) + sigma * N(0, 1). The noiseless test role sets
/// sigma = 0. X depends only on the seed, so a sigma = 0 training set
/// reproduces the noiseless targets at the same seed; callers pass distinct
/// seeds for distinct roles.
Dataset gen_regression(const M1Spec& spec, SampleRole role, std::uint64_t seed);
Dataset gen_regression(const M2Spec& spec, SampleRole role, std::uint64_t seed);

/// Two-class "orange" data: class +1 standard normal in R^2, class -1 standard
/// normal conditioned on 4.5 <= x1^2 + x2^2 <= 8 (rejection sampled), plus q
/// appended standard-normal noise features for both classes. Rows are the
/// +1 class first, then the -1 class.
Dataset gen_orange(std::size_t n_per_class, std::size_t q, std::uint64_t seed);

struct OrangeSample {
    Dataset data;
    /// (x1, x2) pairs drawn for the -1 class, accepted or not.
    std::size_t proposals = 0;
};
OrangeSample gen_orange_counted(std::size_t n_per_class, std::size_t q, std::uint64_t seed);

/// Lower/upper squared radius of the orange annulus.
inline constexpr double kAnnulusLow = 4.5;
inline constexpr double kAnnulusHigh = 8.0;

struct SparseDictionarySpec {
    std::size_t m = 256;
    std::size_t n_atoms = 64;
    std::size_t sparsity = 4;
    double coef_norm = 4.0;
};

/// Realizable squared-loss instance for checking the convergence rate.
///
/// The m sample points are sorted U[0, 1] draws split into P equal blocks,
/// P the smallest power of two >= n_atoms. Atom j takes the value of Walsh
/// column j on each block, and the stack is normalized so that
/// sum_j g_j(x)^2 == 1 at every sample. The atoms are mutually orthogonal
/// over the sample with common squared norm m / n_atoms (`gram_scale`).
/// Targets are h(X) for h = sum of `sparsity` atoms whose absolute
/// coefficients sum to coef_norm, so Q_m(h) = 0.
struct SparseDictionaryInstance {
    Dataset data;
    std::vector<WeakLearner> atoms;
    std::vector<std::size_t> support;
    std::vector<double> coefficients;
    double h_risk = 0.0;
    double h_l1 = 0.0;
    double gram_scale = 1.0;
};

/// Throws InvalidInput for an infeasible spec (n_atoms > m, sparsity outside
/// [1, n_atoms], coef_norm <= 0, or m not divisible by P).
SparseDictionaryInstance gen_sparse_dictionary_instance(const SparseDictionarySpec& spec, std::uint64_t seed);

}  // namespace rboost
