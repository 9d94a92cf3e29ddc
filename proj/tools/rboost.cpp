#include <CLI11.hpp>

#include <iostream>

#include "rboost/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Re-scale boosting and classical boosting variants"};
    app.require_subcommand(1);
    int status = rboost::exit_code::ok;

    rboost::TrainOptions train;
    auto* t = app.add_subcommand("train", "Fit a boosting model to a CSV dataset");
    t->add_option("--data", train.data, "Training CSV (last column is the target)")->required();
    t->add_option("--loss", train.loss, "squared, logistic or exponential")->capture_default_str();
    t->add_option("--learner", train.learner, "stump or tree")->capture_default_str();
    t->add_option("--splits", train.splits, "Internal nodes per tree")->capture_default_str();
    t->add_option("--variant", train.variant, "plain, rescale, shrunk, truncated or epsilon")->capture_default_str();
    t->add_option("--nu", train.nu, "Shrinkage factor (shrunk)");
    t->add_option("--eps", train.eps, "Step length (epsilon)");
    t->add_option("--t0", train.t0, "Truncation scale t0 in t0 * k^(-2/3) (truncated)");
    t->add_option("--u", train.u, "Shrinkage degree 2 / (k + u) (rescale)");
    t->add_option("--schedule", train.schedule, "Shrinkage degree c4 / (c5 k + c6) as c4,c5,c6 (rescale)");
    t->add_option("-k,--iterations", train.iterations, "Boosting iterations")->capture_default_str();
    t->add_option("--seed", train.seed, "Seed recorded in the model file")->capture_default_str();
    t->add_option("--model-out", train.model_out, "Model output path")->required();
    t->add_option("--trace-out", train.trace_out, "Per-iteration trace CSV");
    t->callback([&] { status = rboost::cmd_train(train, std::cout, std::cerr); });

    rboost::PredictOptions pred;
    auto* p = app.add_subcommand("predict", "Score a CSV with a saved model");
    p->add_option("--model", pred.model, "Model file")->required();
    p->add_option("--data", pred.data, "CSV with the model's features, optionally followed by a target")->required();
    p->add_option("--out", pred.out, "Prediction output (default: stdout)");
    p->add_option("--truncate", pred.truncate, "Clamp predictions to [-M, M]");
    p->callback([&] { status = rboost::cmd_predict(pred, std::cout, std::cerr); });

    rboost::SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Run the toy simulations for all five methods");
    s->add_option("--experiment", sim.experiment, "m1, m2 or orange")->required();
    s->add_option("--noise,--sigma,--q", sim.noise, "Noise level sigma (m1, m2) or noise-feature count q (orange)")
        ->capture_default_str();
    s->add_option("--runs", sim.runs, "Independent repetitions")->capture_default_str();
    s->add_option("--seed", sim.seed, "Base seed")->capture_default_str();
    s->add_option("--k-max", sim.k_max, "Iteration cap for tuning");
    s->add_option("--report-out", sim.report_out, "Report CSV (default: stdout)");
    s->callback([&] { status = rboost::cmd_simulate(sim, std::cout, std::cerr); });

    rboost::BenchOptions bench;
    auto* b = app.add_subcommand("bench", "Repeated 50/25/25 benchmark on a CSV dataset");
    b->add_option("--data", bench.data, "Dataset CSV")->required();
    b->add_option("--task", bench.task, "regression or classification")->capture_default_str();
    b->add_option("--runs", bench.runs, "Random splits")->capture_default_str();
    b->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
    b->add_option("--k-max", bench.k_max, "Iteration cap for tuning")->capture_default_str();
    b->add_option("--report-out", bench.report_out, "Report CSV (default: stdout)");
    b->callback([&] { status = rboost::cmd_bench(bench, std::cout, std::cerr); });

    rboost::ConvergenceOptions conv;
    auto* c = app.add_subcommand("convergence", "Excess-risk decay on a realizable sparse dictionary instance");
    c->add_option("--m", conv.m, "Sample size")->capture_default_str();
    c->add_option("--atoms", conv.atoms, "Dictionary size")->capture_default_str();
    c->add_option("--sparsity", conv.sparsity, "Atoms in the target")->capture_default_str();
    c->add_option("--coef-norm", conv.coef_norm, "l1 norm of the target coefficients")->capture_default_str();
    c->add_option("--k-max", conv.k_max, "Iterations")->capture_default_str();
    c->add_option("--seed", conv.seed, "Instance seed")->capture_default_str();
    c->add_option("--report-out", conv.report_out, "Excess-risk CSV (default: stdout)");
    c->callback([&] { status = rboost::cmd_convergence(conv, std::cout, std::cerr); });

    rboost::FetchOptions fetch;
    std::string out_dir = ".";
    std::string cache_dir;
    std::string sources;
    auto* f = app.add_subcommand("fetch", "Download and convert a public dataset");
    f->add_option("--dataset", fetch.dataset, "Dataset name from the source table")->required();
    f->add_option("--url", fetch.url, "Override the source URL");
    f->add_option("--out-dir", out_dir, "Where to write <name>.csv")->capture_default_str();
    f->add_option("--cache-dir", cache_dir, "Raw download cache (default: $RBOOST_CACHE_DIR)");
    f->add_option("--sources", sources, "Source table (default: $RBOOST_SOURCES or the bundled table)");
    f->callback([&] {
        fetch.out_dir = out_dir;
        fetch.cache_dir = cache_dir;
        fetch.sources = sources;
        status = rboost::cmd_fetch(fetch, std::cout, std::cerr);
    });

    rboost::GenOptions gen;
    auto* g = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
    g->add_option("--experiment", gen.experiment, "m1, m2 or orange")->required();
    g->add_option("--n", gen.n, "Rows (per class for orange)")->capture_default_str();
    g->add_option("--noise,--sigma,--q", gen.noise, "sigma (m1, m2) or noise-feature count q (orange)")
        ->capture_default_str();
    g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output CSV (default: stdout)");
    g->callback([&] { status = rboost::cmd_gen(gen, std::cout, std::cerr); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return rboost::exit_code::usage;
    }
    return status;
}
