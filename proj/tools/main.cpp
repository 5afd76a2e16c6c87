// SPDX-License-Identifier: Apache-2.0
//
// starbeam: multi-path beam routing over cascaded STAR-RIS links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "starbeam/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    namespace cli = starbeam::cli;

    CLI::App app{"starbeam: multi-path beam routing over cascaded STAR-RIS links"};
    app.require_subcommand(1);

    std::string scene_path, config_path, out_path;

    auto *solve = app.add_subcommand("solve", "select paths, design the beams and write a JSON report");
    solve->add_option("--scene", scene_path, "scene JSON")->required();
    solve->add_option("--config", config_path, "system config JSON")->required();
    solve->add_option("--out", out_path, "report path")->required();

    std::string param, values, modes;
    cli::SweepSpec spec;
    auto *sweep = app.add_subcommand("sweep", "solve over a range of one parameter and write CSV");
    sweep->add_option("--scene", scene_path, "scene JSON")->required();
    sweep->add_option("--config", config_path, "system config JSON")->required();
    sweep->add_option("--param", param, "m0, s, k or mode")->required();
    sweep->add_option("--values", values, "list a,b,c or range start:step:stop")->required();
    sweep->add_option("--out", out_path, "CSV path")->required();
    sweep->add_option("--seed", spec.seed, "seed for jittered repetitions");
    sweep->add_option("--workers", spec.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
    sweep->add_option("--repetitions", spec.repetitions, "jittered copies of every point")->check(CLI::PositiveNumber);
    sweep->add_option("--jitter", spec.jitter, "user position jitter [m]")->check(CLI::NonNegativeNumber);
    sweep->add_option("--modes", modes, "modes to run for each value (default: all)");
    sweep->add_flag("--omit-timing", spec.omit_timing, "leave wall_ms empty");

    cli::ValidateOptions vopts;
    bool inject_fault = false;
    auto *validate = app.add_subcommand("validate", "run the oracle suite and print a pass/fail table");
    validate->add_option("--scene", scene_path, "scene JSON")->required();
    validate->add_option("--config", config_path, "system config JSON")->required();
    validate->add_option("--seed", vopts.seed, "seed for random amplitude draws");
    validate->add_flag("--inject-beta-fault", inject_fault, "corrupt the amplitudes (test hook)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitInputError;
    }

    if (*solve)
        return cli::cmd_solve(scene_path, config_path, out_path, std::cerr);

    if (*sweep)
    {
        try
        {
            spec.param = cli::parse_sweep_param(param);
            spec.values = cli::expand_values(spec.param, values);
            if (!modes.empty())
            {
                spec.modes.clear();
                for (const auto &m : cli::expand_values(cli::SweepParam::Mode, modes))
                    spec.modes.push_back(starbeam::parse_solver_mode(m));
            }
        }
        catch (const std::exception &e)
        {
            std::cerr << "sweep: " << e.what() << "\n";
            return cli::kExitInputError;
        }
        return cli::cmd_sweep(scene_path, config_path, spec, out_path, std::cerr);
    }

    if (inject_fault)
        vopts.beta_fault = 0.5;
    return cli::cmd_validate(scene_path, config_path, vopts, std::cout, std::cerr);
}
