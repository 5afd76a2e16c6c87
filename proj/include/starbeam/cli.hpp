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

#ifndef STARBEAM_CLI_HPP
#define STARBEAM_CLI_HPP

#include "starbeam/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace starbeam::cli
{
    enum ExitCode : int
    {
        kExitOk = 0,
        kExitInputError = 1,
        kExitInfeasible = 2,
        kExitOracleFailure = 3
    };

    // Single-user solver for one user, max-min multi-user solver otherwise
    Solution solve(const Scene &scene, const SystemConfig &cfg);

    double to_db(double linear);

    // Shortest round-trip decimal form
    std::string format_number(double value);

    struct SolveTiming
    {
        double solve_ms = 0.0;
        double oracle_ms = 0.0;
    };

    std::string solution_report(const Scene &scene, const SystemConfig &cfg, const Solution &solution,
                                const OracleReport &isolated, const OracleReport &composite, const SolveTiming &timing);

    std::string infeasible_report(const SystemConfig &cfg, const InfeasibleError &error);

    int cmd_solve(const std::filesystem::path &scene_path, const std::filesystem::path &config_path,
                  const std::filesystem::path &out_path, std::ostream &err);

    enum class SweepParam
    {
        M0,
        S,
        K,
        Mode
    };

    SweepParam parse_sweep_param(std::string_view text);
    std::string_view to_string(SweepParam param);

    struct SweepSpec
    {
        SweepParam param = SweepParam::M0;
        std::vector<std::string> values;    // one token per sweep point
        std::vector<SolverMode> modes{SolverMode::StarEs, SolverMode::StarMs, SolverMode::ReflectOnly};
        std::uint64_t seed = 0;
        int workers = 1;
        int repetitions = 1;
        double jitter = 0.0;                // user position perturbation [m], per repetition
        bool omit_timing = false;           // leave wall_ms empty so reruns are byte-identical
    };

    // "14:2:24" (inclusive) or "a,b,c"
    std::vector<std::string> expand_values(SweepParam param, std::string_view text);

    struct SweepRow
    {
        std::string value;
        SolverMode mode = SolverMode::StarEs;
        int repetition = 0;
        std::string status; // ok | infeasible
        std::optional<double> objective;
        int paths_selected = 0;
        int max_hops = 0;
        std::size_t clique_count = 0;
        double wall_ms = 0.0;
        std::optional<double> oracle_rel_err;
        bool plateau = false;
        std::uint64_t seed = 0;
    };

    std::vector<SweepRow> run_sweep(const Scene &scene, const SystemConfig &cfg, const SweepSpec &spec);
    std::string sweep_csv(const std::vector<SweepRow> &rows, bool omit_timing);

    int cmd_sweep(const std::filesystem::path &scene_path, const std::filesystem::path &config_path, const SweepSpec &spec,
                  const std::filesystem::path &out_path, std::ostream &err);

    struct ValidationRow
    {
        std::string property;
        bool passed = false;
        std::string detail;
    };

    struct ValidateOptions
    {
        std::uint64_t seed = 1;
        double beta_fault = 0.0;
        std::size_t brute_force_budget = kBruteForceLimit; // candidates handed to the exhaustive search
    };

    std::vector<ValidationRow> run_validation(const Scene &scene, const SystemConfig &cfg, const ValidateOptions &options);
    std::string validation_table(const std::vector<ValidationRow> &rows);

    int cmd_validate(const std::filesystem::path &scene_path, const std::filesystem::path &config_path,
                     const ValidateOptions &options, std::ostream &out, std::ostream &err);
}

#endif
