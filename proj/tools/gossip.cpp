// Copyright 2026 The gossipsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gossip/cli.hpp"

namespace {

void add_common(CLI::App& cmd, gossip::cli::Options& opt, bool with_outputs)
{
    cmd.add_option("config", opt.config_path, "experiment config (JSON) or a run manifest")->required();
    cmd.add_option("--set", opt.sets, "override a field, e.g. schedules.T.value=0.25 (repeatable)");
    cmd.add_option("--seed", opt.seed, "base seed");
    if (!with_outputs)
        return;
    cmd.add_option("--trials", opt.trials, "number of trials");
    cmd.add_option("--steps", opt.steps, "slots per trial");
    cmd.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    cmd.add_option("--format", opt.format, "aggregate format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv)
{
    namespace cli = gossip::cli;
    CLI::App app{"Gossip dynamics with attraction, neglect and repulsion"};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);

    cli::Options opt;
    std::uint64_t trial = 0;
    std::optional<std::string> axis;
    std::vector<double> values;
    std::size_t states = 100;

    auto* simulate = app.add_subcommand("simulate", "write one trajectory CSV");
    add_common(*simulate, opt, true);
    simulate->add_option("--trial", trial, "trial index selecting the random stream");

    auto* experiment = app.add_subcommand("experiment", "run all trials and write the aggregate");
    add_common(*experiment, opt, true);

    auto* sweep = app.add_subcommand("sweep", "one experiment and theory report per axis value");
    add_common(*sweep, opt, true);
    sweep->add_option("--axis", axis, "dotted path of the swept numeric field");
    sweep->add_option("--values", values, "values for the axis, comma separated")->delimiter(',');

    auto* check = app.add_subcommand("check", "print the theory report as JSON");
    add_common(*check, opt, false);

    auto* oracle = app.add_subcommand("oracle", "compare enumerated and spectral one-slot expectations (n <= 4)");
    add_common(*oracle, opt, false);
    oracle->add_option("--states", states, "number of random states")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kConfigError;
    }

    if (*simulate)
        return cli::cmd_simulate(opt, trial);
    if (*experiment)
        return cli::cmd_experiment(opt);
    if (*sweep)
        return cli::cmd_sweep(opt, axis, values);
    if (*check)
        return cli::cmd_check(opt);
    return cli::cmd_oracle(opt, states);
}
