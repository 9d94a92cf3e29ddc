#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rboost {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int data = 3;
inline constexpr int training = 4;
inline constexpr int network = 5;
inline constexpr int checksum = 6;
}  // namespace exit_code

struct TrainOptions {
    std::string data;
    std::string loss = "squared";
    /// stump or tree
    std::string learner = "stump";
    int splits = 4;
    /// plain, rescale, shrunk, truncated or epsilon
    std::string variant = "plain";
    std::optional<double> nu;
    std::optional<double> eps;
    std::optional<double> t0;
    /// rescale with alpha_k = 2 / (k + u)
    std::optional<double> u;
    /// rescale with alpha_k = c4 / (c5 k + c6), given as "c4,c5,c6"
    std::optional<std::string> schedule;
    int iterations = 100;
    std::uint64_t seed = 0;
    std::string model_out;
    std::optional<std::string> trace_out;
};

struct PredictOptions {
    std::string model;
    std::string data;
    /// Standard output when unset.
    std::optional<std::string> out;
    std::optional<double> truncate;
};

struct SimulateOptions {
    std::string experiment;
    /// sigma for m1/m2, feature-noise count q for orange.
    double noise = 0.0;
    int runs = 10;
    std::uint64_t seed = 1;
    std::optional<int> k_max;
    std::optional<std::string> report_out;
};

struct BenchOptions {
    std::string data;
    std::string task = "regression";
    int runs = 20;
    std::uint64_t seed = 1;
    int k_max = 1000;
    std::optional<std::string> report_out;
};

struct ConvergenceOptions {
    std::size_t m = 256;
    std::size_t atoms = 64;
    std::size_t sparsity = 4;
    double coef_norm = 4.0;
    int k_max = 1024;
    std::uint64_t seed = 1;
    std::optional<std::string> report_out;
};

struct FetchOptions {
    std::string dataset;
    std::optional<std::string> url;
    std::filesystem::path out_dir = ".";
    std::filesystem::path cache_dir;
    std::filesystem::path sources;
};

struct GenOptions {
    std::string experiment;
    /// Rows for m1/m2, rows per class for orange.
    std::size_t n = 500;
    double noise = 0.0;
    std::uint64_t seed = 1;
    std::optional<std::string> out;
};

/// Each command returns an exit code and writes one diagnostic line to `err`
/// on failure.
int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_convergence(const ConvergenceOptions& opts, std::ostream& out, std::ostream& err);
int cmd_fetch(const FetchOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);

/// $RBOOST_CACHE_DIR, else $XDG_CACHE_HOME/rboost, else ~/.cache/rboost.
std::filesystem::path default_cache_dir();
/// $RBOOST_SOURCES, else the table installed with the sources.
std::filesystem::path default_sources_path();

}  // namespace rboost
