#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "treelimit/degeneration.hpp"

namespace treelimit {

// Parsed experiment: family, graph, schedule, solver settings, outputs.
struct ExperimentConfig {
    RepresentationFamily family;
    TwistedGraph graph;
    DegenerationParams params;
    std::string csv_path = "results.csv";
    std::string tree_path = "tree.json";
};

// Throws ConfigError (naming the offending field) on schema violations.
ExperimentConfig parse_experiment_config(const std::string& path);

// Runs the experiment, writes the CSV and tree JSON under out_dir, prints a
// summary line per schedule step. Exit status: 0 success, 1 missing file,
// 2 not-tree-like at the final step, 3 schema error.
int run_experiment(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override);

// Reconstruct a tree from a metric JSON file ({"labels":[...], "dist":[[..]]})
// and write/print the tree JSON. Same exit conventions.
int run_tree_command(const std::string& metric_path, double tol, const std::string& out_path);

std::string format_csv(const DegenerationRun& run, const Presentation& pres);

}  // namespace treelimit
