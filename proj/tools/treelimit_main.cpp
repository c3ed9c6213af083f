#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "treelimit/check_suites.hpp"
#include "treelimit/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"treelimit: harmonic maps to H^3 degenerating to R-trees"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "run a degeneration experiment from a JSON config");
    run->add_option("config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_dir, "output directory");
    std::uint64_t seed_value = 0;
    auto* seed_opt = run->add_option("--seed", seed_value, "override the config seed");

    std::string suite;
    bool inject_fault = false;
    auto* check = app.add_subcommand("check", "run a lemma property suite");
    check->add_option("suite", suite, "tree-ops | hyperbolic | lengths | all")->required();
    check->add_flag("--inject-fault", inject_fault, "deliberately break one check (test hook)");

    std::string metric_path, tree_out;
    double tol = 0.05;
    auto* tree = app.add_subcommand("tree", "reconstruct a tree from a metric JSON");
    tree->add_option("metric", metric_path, "metric JSON with a dist matrix")->required();
    tree->add_option("--tol", tol, "four-point tolerance relative to the diameter");
    tree->add_option("--out", tree_out, "write the tree JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    if (run->parsed()) {
        if (seed_opt->count() > 0) seed = seed_value;
        return treelimit::run_experiment(config_path, out_dir, seed);
    }
    if (check->parsed()) return treelimit::run_check_suite(suite, inject_fault);
    if (tree->parsed()) return treelimit::run_tree_command(metric_path, tol, tree_out);
    return 3;
}
