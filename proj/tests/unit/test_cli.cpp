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

#include "fixtures.hpp"
#include "starbeam/cli.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace starbeam;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const fs::path dir = fs::temp_directory_path() / "starbeam_test_cli";
        fs::create_directories(dir);
        return dir / name;
    }

    nlohmann::json read_json(const fs::path &p) { return nlohmann::json::parse(read_text_file(p)); }

    fs::path write_config(const std::string &name, const SystemConfig &cfg)
    {
        const auto p = scratch(name);
        std::ofstream(p) << dump_config(cfg);
        return p;
    }

    std::vector<std::vector<std::string>> parse_csv(const std::string &text)
    {
        std::vector<std::vector<std::string>> rows;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ','))
                cells.push_back(cell);
            if (!line.empty() && line.back() == ',')
                cells.emplace_back();
            rows.push_back(cells);
        }
        return rows;
    }

    const fs::path kSingle = testing::data_dir() / "single_user_scene.json";
    const fs::path kMulti = testing::data_dir() / "multi_user_scene.json";
    const fs::path kConfig = testing::data_dir() / "config.json";
}

TEST_CASE("number formatting")
{
    for (double v : {0.1, 1e-300, 2.2766e-5, 123456789.0, -3.5})
    {
        const auto s = cli::format_number(v);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(cli::to_db(100.0) == doctest::Approx(20.0));
}

TEST_CASE("sweep value parsing")
{
    using cli::SweepParam;
    CHECK(cli::expand_values(SweepParam::M0, "14:2:24") == std::vector<std::string>{"14", "16", "18", "20", "22", "24"});
    CHECK(cli::expand_values(SweepParam::S, "1,4,9") == std::vector<std::string>{"1", "4", "9"});
    CHECK(cli::expand_values(SweepParam::Mode, "star_ms,reflect_only") == std::vector<std::string>{"star_ms", "reflect_only"});
    CHECK_THROWS(cli::expand_values(SweepParam::M0, "14:0:24"));
    CHECK_THROWS(cli::expand_values(SweepParam::M0, "24:2:14"));
    CHECK_THROWS(cli::expand_values(SweepParam::K, "1,,2"));
    CHECK_THROWS(cli::expand_values(SweepParam::K, "x"));
    CHECK_THROWS(cli::expand_values(SweepParam::Mode, "hybrid"));
    CHECK(cli::parse_sweep_param("k") == SweepParam::K);
    CHECK_THROWS(cli::parse_sweep_param("gamma"));
}

TEST_CASE("solve writes a report")
{
    std::ostringstream err;
    const auto out = scratch("single.json");
    REQUIRE(cli::cmd_solve(kSingle, kConfig, out, err) == cli::kExitOk);
    const auto doc = read_json(out);
    CHECK(doc["status"] == "ok");
    CHECK(doc["mode"] == "star_es");
    CHECK(doc["config"].contains("reference_gain"));
    CHECK(doc["config"].contains("ris_element_spacing"));
    const double linear = doc["objective_linear"];
    CHECK(doc["objective_db"].get<double>() == doctest::Approx(10 * std::log10(linear)));
    CHECK(doc["oracle"]["isolated"]["relative_error"].get<double>() < 1e-9);
    CHECK(doc["oracle"]["composite"].contains("leakage_power"));
    double sum = 0.0;
    for (const auto &p : doc["paths"])
        sum += p["f_hat_linear"].get<double>();
    CHECK(sum == doctest::Approx(linear).epsilon(1e-14));

    const auto multi = scratch("multi.json");
    REQUIRE(cli::cmd_solve(kMulti, kConfig, multi, err) == cli::kExitOk);
    const auto m = read_json(multi);
    CHECK(m["users"].size() == 5);
    for (const auto &u : m["users"])
        CHECK(u["received_power_linear"].get<double>() == doctest::Approx(m["objective_linear"].get<double>()).epsilon(1e-12));
}

TEST_CASE("solve exit codes")
{
    std::ostringstream err;
    SystemConfig ro = load_config_file(kConfig);
    ro.mode = SolverMode::ReflectOnly;
    const auto out = scratch("ro.json");
    CHECK(cli::cmd_solve(kMulti, write_config("ro_config.json", ro), out, err) == cli::kExitInfeasible);
    const auto doc = read_json(out);
    CHECK(doc["status"] == "infeasible");
    CHECK_FALSE(doc["users"].empty());

    const auto bad = scratch("bad_scene.json");
    std::ofstream(bad) << "{\"nodes\": [ {\"id\": 0,, }";
    std::ostringstream bad_err;
    CHECK(cli::cmd_solve(bad, kConfig, scratch("x.json"), bad_err) == cli::kExitInputError);
    CHECK(bad_err.str().find("parse error") != std::string::npos);
    CHECK(cli::cmd_solve(scratch("missing.json"), kConfig, scratch("x.json"), err) == cli::kExitInputError);
}

TEST_CASE("m0 sweep: six rows per mode, non-decreasing")
{
    const Scene s = load_scene_file(kSingle);
    const SystemConfig cfg = load_config_file(kConfig);
    cli::SweepSpec spec;
    spec.param = cli::SweepParam::M0;
    spec.values = cli::expand_values(spec.param, "14:2:24");
    spec.omit_timing = true;
    const auto rows = cli::run_sweep(s, cfg, spec);
    REQUIRE(rows.size() == 18);
    std::map<SolverMode, double> last;
    for (const auto &r : rows)
    {
        REQUIRE(r.status == "ok");
        CHECK(*r.objective >= last[r.mode]);
        CHECK(*r.oracle_rel_err < 1e-9);
        last[r.mode] = *r.objective;
    }

    const auto csv = parse_csv(cli::sweep_csv(rows, true));
    CHECK(csv.front().size() == 13);
    CHECK(csv.front()[0] == "value");
    CHECK(csv.size() == 19);
    for (std::size_t i = 1; i < csv.size(); ++i)
        CHECK(csv[i][9].empty());
}

TEST_CASE("s sweep flags the plateau")
{
    const Scene s = load_scene_file(kSingle);
    cli::SweepSpec spec;
    spec.param = cli::SweepParam::S;
    spec.values = cli::expand_values(spec.param, "1:1:16");
    spec.modes = {SolverMode::StarMs};
    const auto rows = cli::run_sweep(s, load_config_file(kConfig), spec);
    REQUIRE(rows.size() == 16);
    bool plateau = false;
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        CHECK(*rows[i].objective >= *rows[i - 1].objective);
        CHECK(rows[i].plateau == (*rows[i].objective == *rows[i - 1].objective));
        plateau = plateau || rows[i].plateau;
    }
    CHECK(plateau);
}

TEST_CASE("k sweep under ReflectOnly turns infeasible")
{
    const Scene s = load_scene_file(kMulti);
    cli::SweepSpec spec;
    spec.param = cli::SweepParam::K;
    spec.values = cli::expand_values(spec.param, "1:1:5");
    spec.modes = {SolverMode::ReflectOnly};
    const auto rows = cli::run_sweep(s, load_config_file(kConfig), spec);
    REQUIRE(rows.size() == 5);
    CHECK(rows.front().status == "ok");
    CHECK(rows.back().status == "infeasible");
    CHECK_FALSE(rows.back().objective.has_value());
    const auto csv = parse_csv(cli::sweep_csv(rows, true));
    CHECK(csv.back()[3] == "infeasible");
    CHECK(csv.back()[4].empty());
}

TEST_CASE("sweep output is deterministic across worker counts")
{
    const Scene s = load_scene_file(kMulti);
    const SystemConfig cfg = load_config_file(kConfig);
    cli::SweepSpec spec;
    spec.param = cli::SweepParam::S;
    spec.values = cli::expand_values(spec.param, "2:2:8");
    spec.repetitions = 2;
    spec.jitter = 0.05;
    spec.seed = 77;
    spec.omit_timing = true;
    const auto serial = cli::sweep_csv(cli::run_sweep(s, cfg, spec), true);
    spec.workers = 4;
    const auto parallel = cli::sweep_csv(cli::run_sweep(s, cfg, spec), true);
    CHECK(serial == parallel);
    CHECK(serial.find(",77\n") != std::string::npos);
    CHECK(serial.find(",78\n") != std::string::npos);
}

TEST_CASE("validate")
{
    std::ostringstream out, err;
    CHECK(cli::cmd_validate(kSingle, kConfig, {}, out, err) == cli::kExitOk);
    CHECK(out.str().find("FAIL") == std::string::npos);
    for (const char *prop : {"yen_vs_enumeration", "clique_vs_bruteforce", "proposition1_equality", "proposition1_dominance",
                             "mode_monotonicity", "equalization", "channel_rank_one"})
        CHECK(out.str().find(prop) != std::string::npos);

    cli::ValidateOptions faulty;
    faulty.beta_fault = 0.5;
    std::ostringstream fout, ferr;
    CHECK(cli::cmd_validate(kSingle, kConfig, faulty, fout, ferr) == cli::kExitOracleFailure);
    CHECK(ferr.str().find("validate: failed: proposition1_equality") != std::string::npos);

    const auto empty = scratch("empty.json");
    std::ofstream(empty) << R"({"nodes": [], "los_pairs": []})";
    std::ostringstream eout, eerr;
    CHECK(cli::cmd_validate(empty, kConfig, {}, eout, eerr) == cli::kExitInputError);
}
