// Experiment CLI: run a scenario, compare policies on one workload, or sweep
// a scenario across node counts.
//
//   dyskew run     --config scenario.json --out report.json [--format json|csv]
//   dyskew compare --config scenario.json --policies never,static_rr,early --out cmp.json
//   dyskew sweep   --config scenario.json --nodes 2,4,8 --out sweep.csv --format csv
//
// The seed can be overridden per invocation; precedence is
// --seed flag > DYSKEW_SEED env var > config file.

#include "dyskew/dyskew.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"dyskew: adaptive data-link simulator and experiment runner"};
    app.require_subcommand(1);

    dyskew::CliOptions opts;
    std::int64_t seed_flag = -1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "scenario config file (JSON)")->required();
        cmd->add_option("--out", opts.out_path, "output report path");
        cmd->add_option("--format", opts.format, "output format: json or csv");
        cmd->add_option("--seed", seed_flag, "override the scenario seed");
    };

    CLI::App* run = app.add_subcommand("run", "simulate one scenario and write its report");
    add_common(run);

    CLI::App* compare =
        app.add_subcommand("compare", "run the same workload under several policies");
    add_common(compare);
    compare->add_option("--policies", opts.policies, "comma-separated policy list")
        ->required()
        ->delimiter(',');

    CLI::App* sweep = app.add_subcommand("sweep", "re-run the scenario across node counts");
    add_common(sweep);
    sweep->add_option("--nodes", opts.node_counts, "comma-separated node counts")
        ->required()
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    if (seed_flag >= 0) {
        opts.seed = static_cast<std::uint64_t>(seed_flag);
    }
    if (run->parsed()) {
        return dyskew::cmd_run(opts);
    }
    if (compare->parsed()) {
        return dyskew::cmd_compare(opts);
    }
    return dyskew::cmd_sweep(opts);
}
