#include "rboost/synthdata.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "rboost/error.hpp"

namespace rboost {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

template <class Target>
Dataset gen_uniform_regression(std::size_t n, std::size_t d, double sigma, SampleRole role, std::uint64_t seed,
                               Target target) {
    if (n < 1) throw InvalidInput("generator: n must be >= 1");
    // Separate streams for X and noise keep X identical across noise levels.
    auto x_rng = make_rng(seed, 0);
    auto noise_rng = make_rng(seed, 1);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double noise = role == SampleRole::test_noiseless ? 0.0 : sigma;

    Matrix x(n, d);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x.row(i)) v = unif(x_rng);
        y[i] = target(x.row(i));
        if (noise != 0.0) y[i] += noise * normal(noise_rng);
    }
    return Dataset(std::move(x), std::move(y), Task::regression);
}

}  // namespace

double m1(double x) {
    if (x >= -2.0 && x < 0.0) return 10.0 * std::sqrt(-x) * std::sin(8.0 * std::numbers::pi * x);
    return 0.0;
}

double m2(std::span<const double> x) {
    if (x.size() != 10) throw InvalidInput("m2: expects 10 coordinates, got " + std::to_string(x.size()));
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double term = x[j] * std::sin(x[j] * x[j]);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sum;
}

Dataset gen_regression(const M1Spec& spec, SampleRole role, std::uint64_t seed) {
    return gen_uniform_regression(spec.n, 1, spec.sigma, role, seed,
                                  [](std::span<const double> x) { return m1(x[0]); });
}

Dataset gen_regression(const M2Spec& spec, SampleRole role, std::uint64_t seed) {
    if (spec.d != 10) throw InvalidInput("m2: dimension must be 10");
    return gen_uniform_regression(spec.n, spec.d, spec.sigma, role, seed,
                                  [](std::span<const double> x) { return m2(x); });
}

Dataset gen_orange(std::size_t n_per_class, std::size_t q, std::uint64_t seed) {
    return gen_orange_counted(n_per_class, q, seed).data;
}

OrangeSample gen_orange_counted(std::size_t n_per_class, std::size_t q, std::uint64_t seed) {
    if (n_per_class < 1) throw InvalidInput("orange: n_per_class must be >= 1");
    auto rng = make_rng(seed, 100);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t d = 2 + q;
    Matrix x(2 * n_per_class, d);
    std::vector<double> y(2 * n_per_class);
    std::size_t proposals = 0;
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        auto row = x.row(i);
        const bool inner_class = i < n_per_class;
        y[i] = inner_class ? 1.0 : -1.0;
        while (true) {
            row[0] = normal(rng);
            row[1] = normal(rng);
            if (inner_class) break;
            ++proposals;
            const double r2 = row[0] * row[0] + row[1] * row[1];
            if (r2 >= kAnnulusLow && r2 <= kAnnulusHigh) break;
        }
        for (std::size_t j = 2; j < d; ++j) row[j] = normal(rng);
    }
    return {Dataset(std::move(x), std::move(y), Task::binary_classification), proposals};
}

SparseDictionaryInstance gen_sparse_dictionary_instance(const SparseDictionarySpec& spec, std::uint64_t seed) {
    const std::size_t m = spec.m;
    const std::size_t n = spec.n_atoms;
    if (n < 1 || n > m) throw InvalidInput("sparse dictionary: need 1 <= n_atoms <= m");
    if (spec.sparsity < 1 || spec.sparsity > n) throw InvalidInput("sparse dictionary: need 1 <= sparsity <= n_atoms");
    if (!(spec.coef_norm > 0.0)) throw InvalidInput("sparse dictionary: coef_norm must be positive");
    std::size_t blocks = 1;
    while (blocks < n) blocks *= 2;
    if (blocks > m || m % blocks != 0) {
        throw InvalidInput("sparse dictionary: m = " + std::to_string(m) + " is not a multiple of " +
                           std::to_string(blocks) + " blocks");
    }
    const std::size_t block_size = m / blocks;

    auto rng = make_rng(seed, 200);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> xs(m);
    for (double& v : xs) v = unif(rng);
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw InvalidInput("sparse dictionary: duplicate sample points");
    }

    // Sylvester-Hadamard sign: H[b][j] = (-1)^popcount(b & j).
    auto walsh = [](std::size_t b, std::size_t j) { return (std::popcount(b & j) % 2 == 0) ? 1.0 : -1.0; };
    Matrix raw(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) raw(i, j) = walsh(i / block_size, j);
    }
    const Matrix stack = normalize_dictionary_columns(raw);

    std::vector<double> breakpoints;
    for (std::size_t b = 1; b < blocks; ++b) {
        const std::size_t last = b * block_size - 1;
        breakpoints.push_back(xs[last] + (xs[last + 1] - xs[last]) / 2.0);
    }
    std::vector<WeakLearner> atoms;
    atoms.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> values(blocks);
        for (std::size_t b = 0; b < blocks; ++b) values[b] = stack(b * block_size, j);
        atoms.push_back(WeakLearner{make_step_function(0, breakpoints, values), std::nullopt});
    }

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> support(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(spec.sparsity));
    std::sort(support.begin(), support.end());

    std::uniform_real_distribution<double> weight(0.5, 1.5);
    std::vector<double> coefs(spec.sparsity);
    double total = 0.0;
    for (double& c : coefs) total += (c = weight(rng));
    for (double& c : coefs) c = c / total * spec.coef_norm * (unif(rng) < 0.5 ? -1.0 : 1.0);

    Matrix x(m, 1, xs);
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < support.size(); ++s) y[i] += coefs[s] * stack(i, support[s]);
    }
    const double l1 = std::accumulate(coefs.begin(), coefs.end(), 0.0,
                                      [](double acc, double c) { return acc + std::abs(c); });
    return SparseDictionaryInstance{Dataset(std::move(x), std::move(y), Task::regression),
                                    std::move(atoms),
                                    std::move(support),
                                    std::move(coefs),
                                    0.0,
                                    l1,
                                    static_cast<double>(m) / static_cast<double>(n)};
}

}  // namespace rboost
