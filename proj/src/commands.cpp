#include "rboost/commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "rboost/boosters.hpp"
#include "rboost/csv.hpp"
#include "rboost/error.hpp"
#include "rboost/fetch.hpp"
#include "rboost/harness.hpp"
#include "rboost/model_file.hpp"
#include "rboost/synthdata.hpp"

#ifndef RBOOST_DEFAULT_SOURCES
#define RBOOST_DEFAULT_SOURCES "data/datasets.conf"
#endif

namespace rboost {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string message;
};

template <class Fn>
auto stage(int code, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Failure&) {
        throw;
    } catch (const std::exception& e) {
        throw Failure{code, e.what()};
    }
}

int run(std::string_view command, std::ostream& err, const std::function<void()>& body) {
    try {
        body();
        return exit_code::ok;
    } catch (const Failure& f) {
        err << "rboost " << command << ": " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        err << "rboost " << command << ": " << e.what() << '\n';
        return exit_code::training;
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Writes through `fallback` when no path (or "-") is given.
void emit(const std::optional<std::string>& path, std::ostream& fallback, const std::string& text) {
    if (!path || *path == "-") {
        fallback << text;
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + *path + "' for writing");
    file << text;
    if (!file) throw std::runtime_error("write to '" + *path + "' failed");
}

ShrinkageSchedule parse_schedule(const std::string& text) {
    std::array<double, 3> c{};
    std::istringstream in(text);
    char comma = 0;
    if (!(in >> c[0] >> comma) || comma != ',' || !(in >> c[1] >> comma) || comma != ',' || !(in >> c[2]) ||
        !(in >> std::ws).eof()) {
        throw InvalidInput("--schedule expects c4,c5,c6, got '" + text + "'");
    }
    return {c[0], c[1], c[2]};
}

VariantSpec variant_from(const TrainOptions& o) {
    auto reject = [&](bool present, const char* flag) {
        if (present) throw InvalidInput(std::string(flag) + " does not apply to variant '" + o.variant + "'");
    };
    VariantSpec spec;
    if (o.variant == "plain") {
        spec = variant::Plain{};
    } else if (o.variant == "rescale") {
        if (o.u && o.schedule) throw InvalidInput("--u and --schedule are mutually exclusive");
        ShrinkageSchedule s = ShrinkageSchedule::theorem();
        if (o.u) s = ShrinkageSchedule::experimental(*o.u);
        if (o.schedule) s = parse_schedule(*o.schedule);
        spec = variant::Rescale{s};
    } else if (o.variant == "shrunk") {
        spec = variant::Shrunk{o.nu.value_or(0.1)};
    } else if (o.variant == "truncated") {
        spec = variant::Truncated{o.t0.value_or(1.0), 2.0 / 3.0};
    } else if (o.variant == "epsilon") {
        spec = variant::Epsilon{o.eps.value_or(0.1)};
    } else {
        throw InvalidInput("unknown variant '" + o.variant + "' (plain, rescale, shrunk, truncated, epsilon)");
    }
    reject(o.nu && o.variant != "shrunk", "--nu");
    reject(o.eps && o.variant != "epsilon", "--eps");
    reject(o.t0 && o.variant != "truncated", "--t0");
    reject((o.u || o.schedule) && o.variant != "rescale", "--u/--schedule");
    validate(spec);
    return spec;
}

LearnerSpec learner_from(const TrainOptions& o) {
    if (o.learner == "stump") return learner::Stump{};
    if (o.learner == "tree") {
        if (o.splits < 1) throw InvalidInput("--splits must be >= 1");
        return learner::Tree{o.splits};
    }
    throw InvalidInput("unknown learner '" + o.learner + "' (stump, tree)");
}

}  // namespace

fs::path default_cache_dir() {
    if (const char* dir = std::getenv("RBOOST_CACHE_DIR"); dir && *dir) return dir;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "rboost";
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "rboost";
    return fs::path(".rboost-cache");
}

fs::path default_sources_path() {
    if (const char* path = std::getenv("RBOOST_SOURCES"); path && *path) return path;
    return RBOOST_DEFAULT_SOURCES;
}

int cmd_train(const TrainOptions& opts, std::ostream& out, std::ostream& err) {
    return run("train", err, [&] {
        const auto config = stage(exit_code::usage, [&] {
            if (opts.iterations < 1) throw InvalidInput("--iterations must be >= 1");
            if (opts.model_out.empty()) throw InvalidInput("--model-out is required");
            TrainConfig c;
            c.max_iterations = opts.iterations;
            c.loss = parse_loss(opts.loss);
            c.learner = learner_from(opts);
            c.variant = variant_from(opts);
            c.record_trace = true;
            return c;
        });
        const Task task = is_classification_loss(config.loss) ? Task::binary_classification : Task::regression;
        const Dataset data = stage(exit_code::data, [&] { return read_dataset_csv(opts.data, task, err); });
        const TrainResult result = stage(exit_code::training, [&] { return train(data, config, opts.seed); });
        stage(exit_code::training, [&] {
            save_model(opts.model_out, ModelFile{config.loss, task, opts.seed, result.model});
            if (opts.trace_out) {
                std::ostringstream trace;
                write_trace_csv(trace, result.trace);
                emit(opts.trace_out, out, trace.str());
            }
            return 0;
        });
        if (result.stop == StopReason::degenerate_direction) {
            err << "note: stopped after " << result.trace.records.size()
                << " iterations (weak learner fit is identically zero)\n";
        }
    });
}

int cmd_predict(const PredictOptions& opts, std::ostream& out, std::ostream& err) {
    return run("predict", err, [&] {
        stage(exit_code::usage, [&] {
            if (opts.truncate && !(*opts.truncate > 0.0)) throw InvalidInput("--truncate must be positive");
            return 0;
        });
        const ModelFile file = stage(exit_code::data, [&] { return load_model(opts.model); });
        const NumericTable table = stage(exit_code::data, [&] { return read_numeric_csv(opts.data); });
        const std::size_t want = file.model.feature_count();
        const std::size_t have = table.values.cols();
        if (have != want && have != want + 1) {
            throw Failure{exit_code::data, "feature count mismatch: model expects " + std::to_string(want) +
                                               " columns (or " + std::to_string(want + 1) +
                                               " with a target), data has " + std::to_string(have)};
        }
        Matrix x(table.values.rows(), want);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < want; ++j) x(i, j) = table.values(i, j);
        }
        std::vector<double> preds = predict(file.model, x);
        if (opts.truncate) preds = truncate_predictions(preds, *opts.truncate);
        std::string text = "prediction\n";
        for (double p : preds) text += fmt(p) + '\n';
        stage(exit_code::data, [&] {
            emit(opts.out, out, text);
            return 0;
        });
    });
}

namespace {

void finish_report(const ExperimentReport& report, const std::optional<std::string>& path, std::ostream& out,
                   std::ostream& err) {
    std::ostringstream csv;
    write_report_csv(csv, report);
    emit(path, out, csv.str());
    for (const auto& row : report.methods) {
        if (row.failed_runs > 0) {
            err << "warning: " << method_name(row.method) << " failed in " << row.failed_runs << " run(s)\n";
        }
    }
    for (const auto& row : report.methods) {
        if (row.runs == 0) throw Failure{exit_code::training, "every run of " + std::string(method_name(row.method)) + " failed"};
    }
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    return run("simulate", err, [&] {
        const auto spec = stage(exit_code::usage, [&] {
            if (opts.runs < 1) throw InvalidInput("--runs must be >= 1");
            const Simulation sim = parse_simulation(opts.experiment);
            if (sim == Simulation::orange && (opts.noise < 0.0 || opts.noise != std::floor(opts.noise))) {
                throw InvalidInput("orange noise q must be a non-negative integer");
            }
            if (sim != Simulation::orange && !(opts.noise >= 0.0)) throw InvalidInput("sigma must be >= 0");
            const int k_max = opts.k_max.value_or(default_k_max(sim));
            if (k_max < 1) throw InvalidInput("--k-max must be >= 1");
            return simulation_spec(sim, opts.noise, k_max);
        });
        const auto report =
            stage(exit_code::training, [&] { return repeat_experiment(spec, opts.runs, opts.seed); });
        stage(exit_code::training, [&] {
            finish_report(report, opts.report_out, out, err);
            return 0;
        });
    });
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
    return run("bench", err, [&] {
        const Task task = stage(exit_code::usage, [&] {
            if (opts.runs < 1) throw InvalidInput("--runs must be >= 1");
            if (opts.k_max < 1) throw InvalidInput("--k-max must be >= 1");
            return parse_task(opts.task);
        });
        Dataset data = stage(exit_code::data, [&] { return read_dataset_csv(opts.data, task, err); });
        const auto spec = stage(exit_code::data, [&] { return bench_spec(std::move(data), opts.k_max); });
        const auto report =
            stage(exit_code::training, [&] { return repeat_experiment(spec, opts.runs, opts.seed); });
        stage(exit_code::training, [&] {
            finish_report(report, opts.report_out, out, err);
            return 0;
        });
    });
}

int cmd_convergence(const ConvergenceOptions& opts, std::ostream& out, std::ostream& err) {
    return run("convergence", err, [&] {
        stage(exit_code::usage, [&] {
            if (opts.k_max < 96) throw InvalidInput("--k-max must be >= 96 for a slope over [k_max/32, k_max]");
            return 0;
        });
        const auto inst = stage(exit_code::training, [&] {
            return gen_sparse_dictionary_instance(
                SparseDictionarySpec{opts.m, opts.atoms, opts.sparsity, opts.coef_norm}, opts.seed);
        });
        auto run_variant = [&](VariantSpec variant) {
            return stage(exit_code::training, [&] {
                TrainConfig c{opts.k_max, LossKind::squared, learner::Dictionary{inst.atoms}, variant, true, 0.0};
                auto result = train(inst.data, c, opts.seed);
                auto excess = excess_risk_trace(result.trace, inst.h_risk);
                excess.resize(static_cast<std::size_t>(opts.k_max), excess.empty() ? 0.0 : excess.back());
                return excess;
            });
        };
        const auto rb = run_variant(variant::Rescale{ShrinkageSchedule::theorem()});
        const auto plain = run_variant(variant::Plain{});

        std::string csv = "k,rboosting_excess,boosting_excess\n";
        for (std::size_t k = 0; k < rb.size(); ++k) {
            csv += std::to_string(k + 1) + ',' + fmt(rb[k]) + ',' + fmt(plain[k]) + '\n';
        }
        const int lo = opts.k_max / 32;
        const double slope_rb = convergence_slope(rb, lo, opts.k_max);
        const double slope_plain = convergence_slope(plain, lo, opts.k_max);
        stage(exit_code::training, [&] {
            emit(opts.report_out, out, csv);
            return 0;
        });
        std::ostream& summary = opts.report_out ? out : err;
        summary << "slope over k in [" << lo << ", " << opts.k_max << "]: rboosting " << slope_rb << ", boosting "
                << slope_plain << '\n';
    });
}

int cmd_fetch(const FetchOptions& opts, std::ostream& out, std::ostream& err) {
    return run("fetch", err, [&] {
        const auto table = stage(exit_code::usage, [&] {
            auto t = load_source_table(opts.sources.empty() ? default_sources_path() : opts.sources);
            find_source(t, opts.dataset);
            return t;
        });
        FetchRequest request{opts.dataset, opts.url, opts.out_dir,
                             opts.cache_dir.empty() ? default_cache_dir() : opts.cache_dir};
        try {
            const FetchResult r = fetch_dataset(table, request);
            out << r.csv_path.string() << ": " << r.rows << " rows, " << r.features << " features"
                << (r.cache_hit ? " (cached)" : "") << '\n';
        } catch (const NetworkError& e) {
            throw Failure{exit_code::network, e.what()};
        } catch (const ChecksumMismatch& e) {
            throw Failure{exit_code::checksum, e.what()};
        } catch (const std::exception& e) {
            throw Failure{exit_code::data, e.what()};
        }
    });
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
    return run("gen", err, [&] {
        const Dataset data = stage(exit_code::usage, [&] {
            switch (parse_simulation(opts.experiment)) {
                case Simulation::m1: return gen_regression(M1Spec{opts.n, opts.noise}, SampleRole::train, opts.seed);
                case Simulation::m2:
                    return gen_regression(M2Spec{opts.n, opts.noise, 10}, SampleRole::train, opts.seed);
                case Simulation::orange:
                    if (opts.noise < 0.0 || opts.noise != std::floor(opts.noise)) {
                        throw InvalidInput("orange noise q must be a non-negative integer");
                    }
                    return gen_orange(opts.n, static_cast<std::size_t>(opts.noise), opts.seed);
            }
            throw InvalidInput("unknown experiment");
        });
        std::ostringstream csv;
        write_dataset_csv(csv, data);
        stage(exit_code::data, [&] {
            emit(opts.out, out, csv.str());
            return 0;
        });
    });
}

}  // namespace rboost
