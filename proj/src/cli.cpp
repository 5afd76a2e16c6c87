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

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace starbeam::cli
{
    namespace
    {
        using Json = nlohmann::ordered_json;
        using Clock = std::chrono::steady_clock;

        double elapsed_ms(Clock::time_point start)
        {
            return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        }

        void write_text(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw std::runtime_error("cannot open " + path.string() + " for writing");
            out << text;
            if (!out)
                throw std::runtime_error("failed writing " + path.string());
        }

        Json oracle_json(const OracleReport &r)
        {
            Json j;
            j["mode"] = std::string(to_string(r.mode));
            j["predicted"] = r.predicted;
            j["simulated"] = r.simulated;
            j["relative_error"] = r.relative_error;
            if (r.leakage_power)
                j["leakage_power"] = *r.leakage_power;
            j["users"] = r.users;
            j["user_predicted"] = r.user_predicted;
            j["user_simulated"] = r.user_simulated;
            return j;
        }

        int parse_int(std::string_view text, std::string_view what)
        {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || ptr != text.data() + text.size())
                throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(text) + "'");
            return v;
        }

        std::vector<std::string> split(std::string_view text, char sep)
        {
            std::vector<std::string> out;
            std::size_t start = 0;
            while (true)
            {
                const auto pos = text.find(sep, start);
                out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        Scene jittered(const Scene &scene, double jitter, std::uint64_t seed)
        {
            if (jitter <= 0.0)
                return scene;
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> offset(-jitter, jitter);
            auto nodes = scene.nodes();
            for (auto &n : nodes)
                if (n.kind == NodeKind::User)
                    for (int c = 0; c < 3; ++c)
                        n.position[c] += offset(rng);
            return Scene(std::move(nodes), scene.los_pairs(), scene.bs_array_axis());
        }

        struct SweepPoint
        {
            Scene scene;
            SystemConfig cfg;
        };

        SweepPoint sweep_point(const Scene &scene, const SystemConfig &cfg, SweepParam param, const std::string &value, SolverMode mode)
        {
            SweepPoint p{scene, cfg};
            p.cfg.mode = mode;
            switch (param)
            {
            case SweepParam::M0:
                p.cfg.m0 = parse_int(value, "m0");
                break;
            case SweepParam::S:
                p.cfg.candidates_per_user = parse_int(value, "s");
                break;
            case SweepParam::K:
                p.scene = scene.with_users(parse_int(value, "k"));
                break;
            case SweepParam::Mode:
                p.cfg.mode = parse_solver_mode(value);
                break;
            }
            p.cfg.validate();
            return p;
        }

        std::optional<Solution> try_solve(const Scene &scene, const SystemConfig &cfg)
        {
            try
            {
                return solve(scene, cfg);
            }
            catch (const InfeasibleError &)
            {
                return std::nullopt;
            }
        }
    }

    Solution solve(const Scene &scene, const SystemConfig &cfg)
    {
        cfg.validate();
        if (scene.num_users() == 1)
            return solve_single_user(scene, cfg);
        return solve_multi_user(scene, cfg);
    }

    double to_db(double linear) { return 10.0 * std::log10(linear); }

    std::string format_number(double value)
    {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
        if (ec != std::errc{})
            throw std::runtime_error("number formatting failed");
        return std::string(buf, ptr);
    }

    std::string solution_report(const Scene &scene, const SystemConfig &cfg, const Solution &solution,
                                const OracleReport &isolated, const OracleReport &composite, const SolveTiming &timing)
    {
        Json doc;
        doc["status"] = "ok";
        doc["config"] = Json::parse(dump_config(cfg));
        doc["scene"] = {{"num_ris", scene.num_ris()}, {"num_users", scene.num_users()}};
        doc["mode"] = std::string(to_string(solution.mode));
        doc["objective_linear"] = solution.objective;
        doc["objective_db"] = to_db(solution.objective);

        const auto &power = solution.designs.power;
        Json users = Json::array();
        for (std::size_t k = 0; k < power.users.size(); ++k)
        {
            const double p = solution.designs.predicted_power[k];
            users.push_back({{"user", power.users[k]},
                             {"alpha", power.user_fractions[k]},
                             {"gain", solution.user_gains[k]},
                             {"received_power_linear", p},
                             {"received_power_db", to_db(p)}});
        }
        doc["users"] = std::move(users);

        Json paths = Json::array();
        for (const auto &path : solution.paths)
        {
            Json surfaces = Json::array();
            for (auto s : path.hop_surfaces)
                surfaces.push_back(std::string(to_string(s)));
            const double realized = realized_path_gain(path, solution.designs.amplitudes);
            paths.push_back({{"user", path.user},
                             {"ris_sequence", path.ris_sequence},
                             {"surfaces", std::move(surfaces)},
                             {"hop_distances", path.hop_distances},
                             {"total_distance", path.total_distance},
                             {"kappa", path.kappa},
                             {"f_hat_linear", path.f_hat},
                             {"f_hat_db", to_db(path.f_hat)},
                             {"realized_gain_linear", realized},
                             {"realized_gain_db", to_db(realized)}});
        }
        doc["paths"] = std::move(paths);

        Json beams = Json::array();
        for (std::size_t q = 0; q < solution.forest.beams.size(); ++q)
        {
            const auto &b = solution.forest.beams[q];
            beams.push_back({{"user", b.user}, {"first_ris", b.first_ris}, {"alpha", power.beam_fractions[q]}, {"paths", b.members}});
        }
        doc["beams"] = std::move(beams);

        Json amplitudes = Json::array();
        for (const auto &[j, beta] : solution.designs.amplitudes)
            amplitudes.push_back({{"node", j}, {"reflect", beta.reflect}, {"transmit", beta.transmit}});
        doc["amplitudes"] = std::move(amplitudes);

        Json phases = Json::array();
        for (const auto &[key, profile] : solution.designs.phases)
            phases.push_back({{"node", key.first},
                              {"surface", std::string(to_string(key.second))},
                              {"extra_rotation", profile.extra_rotation},
                              {"phases", profile.phases}});
        doc["phases"] = std::move(phases);

        doc["oracle"] = {{"isolated", oracle_json(isolated)}, {"composite", oracle_json(composite)}};
        doc["clique_stats"] = {{"candidates", solution.stats.candidates},
                               {"edges", solution.stats.edges},
                               {"maximal_cliques", solution.stats.maximal_cliques}};
        doc["candidate_limit_binding"] = solution.candidate_limit_binding;
        doc["timing_ms"] = {{"solve", timing.solve_ms}, {"oracle", timing.oracle_ms}};
        return doc.dump(2) + "\n";
    }

    std::string infeasible_report(const SystemConfig &cfg, const InfeasibleError &error)
    {
        Json doc;
        doc["status"] = "infeasible";
        doc["config"] = Json::parse(dump_config(cfg));
        doc["message"] = error.what();
        doc["users"] = error.users();
        return doc.dump(2) + "\n";
    }

    int cmd_solve(const std::filesystem::path &scene_path, const std::filesystem::path &config_path,
                  const std::filesystem::path &out_path, std::ostream &err)
    {
        std::optional<Scene> scene;
        SystemConfig cfg;
        try
        {
            scene = load_scene_file(scene_path);
            cfg = load_config_file(config_path);
            cfg.validate();
        }
        catch (const std::exception &e)
        {
            err << "solve: " << e.what() << "\n";
            return kExitInputError;
        }

        try
        {
            const auto start = Clock::now();
            const Solution solution = solve(*scene, cfg);
            SolveTiming timing;
            timing.solve_ms = elapsed_ms(start);

            const auto oracle_start = Clock::now();
            const auto isolated = simulate_received_power(*scene, cfg, solution, OracleMode::Isolated);
            const auto composite = simulate_received_power(*scene, cfg, solution, OracleMode::Composite);
            timing.oracle_ms = elapsed_ms(oracle_start);

            write_text(out_path, solution_report(*scene, cfg, solution, isolated, composite, timing));
            return kExitOk;
        }
        catch (const InfeasibleError &e)
        {
            err << "solve: infeasible: " << e.what() << "\n";
            try
            {
                write_text(out_path, infeasible_report(cfg, e));
            }
            catch (const std::exception &w)
            {
                err << "solve: " << w.what() << "\n";
                return kExitInputError;
            }
            return kExitInfeasible;
        }
        catch (const std::exception &e)
        {
            err << "solve: " << e.what() << "\n";
            return kExitInputError;
        }
    }

    SweepParam parse_sweep_param(std::string_view text)
    {
        if (text == "m0")
            return SweepParam::M0;
        if (text == "s")
            return SweepParam::S;
        if (text == "k")
            return SweepParam::K;
        if (text == "mode")
            return SweepParam::Mode;
        throw std::invalid_argument("unknown sweep parameter '" + std::string(text) + "' (expected m0, s, k or mode)");
    }

    std::string_view to_string(SweepParam param)
    {
        switch (param)
        {
        case SweepParam::M0:
            return "m0";
        case SweepParam::S:
            return "s";
        case SweepParam::K:
            return "k";
        case SweepParam::Mode:
            return "mode";
        }
        return "?";
    }

    std::vector<std::string> expand_values(SweepParam param, std::string_view text)
    {
        std::vector<std::string> out;
        if (param != SweepParam::Mode && text.find(':') != std::string_view::npos)
        {
            const auto parts = split(text, ':');
            if (parts.size() != 3)
                throw std::invalid_argument("range must be start:step:stop");
            const int start = parse_int(parts[0], "range start");
            const int step = parse_int(parts[1], "range step");
            const int stop = parse_int(parts[2], "range stop");
            if (step <= 0 || stop < start)
                throw std::invalid_argument("range needs a positive step and stop >= start");
            for (int v = start; v <= stop; v += step)
                out.push_back(std::to_string(v));
        }
        else
        {
            for (auto &token : split(text, ','))
            {
                if (token.empty())
                    throw std::invalid_argument("empty value in list");
                if (param == SweepParam::Mode)
                    token = std::string(to_string(parse_solver_mode(token)));
                else
                    token = std::to_string(parse_int(token, "value"));
                out.push_back(std::move(token));
            }
        }
        if (out.empty())
            throw std::invalid_argument("no sweep values");
        return out;
    }

    std::vector<SweepRow> run_sweep(const Scene &scene, const SystemConfig &cfg, const SweepSpec &spec)
    {
        if (spec.values.empty())
            throw std::invalid_argument("no sweep values");
        if (spec.repetitions < 1 || spec.workers < 1)
            throw std::invalid_argument("repetitions and workers must be >= 1");

        const std::vector<SolverMode> modes = spec.param == SweepParam::Mode ? std::vector<SolverMode>{cfg.mode} : spec.modes;
        std::vector<SweepRow> rows;
        std::vector<SweepPoint> points;
        for (const auto &value : spec.values)
            for (auto mode : modes)
                for (int rep = 0; rep < spec.repetitions; ++rep)
                {
                    SweepRow row;
                    row.value = value;
                    row.repetition = rep;
                    row.seed = spec.seed + static_cast<std::uint64_t>(rep);
                    auto point = sweep_point(scene, cfg, spec.param, value, mode);
                    point.scene = jittered(point.scene, spec.jitter, row.seed);
                    row.mode = point.cfg.mode;
                    rows.push_back(std::move(row));
                    points.push_back(std::move(point));
                }

        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> failures(rows.size());
        auto work = [&]
        {
            for (std::size_t i = next++; i < rows.size(); i = next++)
            {
                auto &row = rows[i];
                try
                {
                    const auto start = Clock::now();
                    const auto solution = try_solve(points[i].scene, points[i].cfg);
                    row.wall_ms = elapsed_ms(start);
                    if (!solution)
                    {
                        row.status = "infeasible";
                        continue;
                    }
                    row.status = "ok";
                    row.objective = solution->objective;
                    row.paths_selected = static_cast<int>(solution->paths.size());
                    for (const auto &p : solution->paths)
                        row.max_hops = std::max(row.max_hops, p.num_ris() + 1);
                    row.clique_count = solution->stats.maximal_cliques;
                    row.oracle_rel_err = simulate_received_power(points[i].scene, points[i].cfg, *solution, OracleMode::Isolated).relative_error;
                }
                catch (...)
                {
                    failures[i] = std::current_exception();
                }
            }
        };

        const int n_threads = std::min<int>(spec.workers, static_cast<int>(rows.size()));
        std::vector<std::thread> threads;
        for (int t = 1; t < n_threads; ++t)
            threads.emplace_back(work);
        work();
        for (auto &t : threads)
            t.join();
        for (const auto &f : failures)
            if (f)
                std::rethrow_exception(f);

        // Plateau: same objective as the previous sweep value for this mode and repetition
        std::map<std::pair<SolverMode, int>, const SweepRow *> previous;
        for (auto &row : rows)
        {
            const auto key = std::make_pair(row.mode, row.repetition);
            const auto it = previous.find(key);
            if (it != previous.end() && row.objective && it->second->objective && *row.objective == *it->second->objective)
                row.plateau = true;
            previous[key] = &row;
        }
        return rows;
    }

    std::string sweep_csv(const std::vector<SweepRow> &rows, bool omit_timing)
    {
        std::ostringstream out;
        out << "value,mode,repetition,status,objective_linear,objective_db,paths_selected,max_hops,clique_count,wall_ms,oracle_rel_err,plateau,seed\n";
        for (const auto &r : rows)
        {
            out << r.value << ',' << to_string(r.mode) << ',' << r.repetition << ',' << r.status << ',';
            if (r.objective)
                out << format_number(*r.objective) << ',' << format_number(to_db(*r.objective)) << ',';
            else
                out << ",,";
            out << r.paths_selected << ',' << r.max_hops << ',' << r.clique_count << ',';
            if (!omit_timing)
                out << format_number(r.wall_ms);
            out << ',';
            if (r.oracle_rel_err)
                out << format_number(*r.oracle_rel_err);
            out << ',' << (r.plateau ? 1 : 0) << ',' << r.seed << '\n';
        }
        return out.str();
    }

    int cmd_sweep(const std::filesystem::path &scene_path, const std::filesystem::path &config_path, const SweepSpec &spec,
                  const std::filesystem::path &out_path, std::ostream &err)
    {
        try
        {
            const auto scene = load_scene_file(scene_path);
            const auto cfg = load_config_file(config_path);
            const auto rows = run_sweep(scene, cfg, spec);
            write_text(out_path, sweep_csv(rows, spec.omit_timing));
            return kExitOk;
        }
        catch (const std::exception &e)
        {
            err << "sweep: " << e.what() << "\n";
            return kExitInputError;
        }
    }

    std::vector<ValidationRow> run_validation(const Scene &scene, const SystemConfig &cfg, const ValidateOptions &options)
    {
        cfg.validate();
        std::vector<ValidationRow> rows;
        const auto users = scene.user_nodes();
        const auto graph = build_los_graph(scene, cfg);

        {
            ValidationRow row{"yen_vs_enumeration", true, ""};
            std::size_t compared = 0;
            for (NodeId u : users)
            {
                const auto yen = yen_k_shortest(graph, kBsNode, u, cfg.candidates_per_user);
                auto all = enumerate_all_paths(graph, kBsNode, u, scene.num_nodes());
                std::sort(all.begin(), all.end(), stub_less);
                if (all.size() > yen.size())
                    all.resize(yen.size());
                bool same = all.size() == yen.size();
                for (std::size_t i = 0; same && i < yen.size(); ++i)
                    same = yen[i].nodes == all[i].nodes && yen[i].weight == all[i].weight;
                if (!same)
                {
                    row.passed = false;
                    row.detail = "mismatch for user " + std::to_string(u);
                }
                compared += yen.size();
            }
            if (row.passed)
                row.detail = std::to_string(compared) + " ranked paths identical";
            rows.push_back(row);
        }

        {
            // Exhaustive search needs small candidate pools: every prefix of the user list, S capped per size
            ValidationRow row{"clique_vs_bruteforce", true, ""};
            int compared = 0, feasible = 0;
            for (int k = 1; k <= scene.num_users(); ++k)
            {
                const Scene sub = scene.with_users(k);
                const auto sub_users = sub.user_nodes();
                for (auto mode : {SolverMode::StarEs, SolverMode::StarMs, SolverMode::ReflectOnly})
                {
                    SystemConfig reduced = cfg;
                    reduced.mode = mode;
                    reduced.candidates_per_user = std::max(1, std::min(cfg.candidates_per_user, static_cast<int>(options.brute_force_budget) / k));
                    auto candidates = admissible_candidates(sub, reduced, sub_users);
                    auto pool_size = [&]
                    {
                        std::size_t total = 0;
                        for (const auto &c : candidates)
                            total += c.size();
                        return total;
                    };
                    while (pool_size() > kBruteForceLimit && reduced.candidates_per_user > 1)
                    {
                        --reduced.candidates_per_user;
                        candidates = admissible_candidates(sub, reduced, sub_users);
                    }
                    if (pool_size() > kBruteForceLimit)
                        continue;
                    const auto solved = try_solve(sub, reduced);
                    const auto brute = brute_force_select(sub, reduced, candidates, mode);
                    bool same = solved.has_value() == brute.has_value();
                    if (same && solved)
                    {
                        same = solved->objective == brute->objective && solved->paths.size() == brute->paths.size();
                        for (std::size_t i = 0; same && i < brute->paths.size(); ++i)
                            same = same_route(solved->paths[i], brute->paths[i]);
                    }
                    ++compared;
                    feasible += solved ? 1 : 0;
                    if (!same)
                    {
                        row.passed = false;
                        row.detail = "mismatch for K=" + std::to_string(k) + " " + std::string(to_string(mode)) + "; ";
                    }
                }
            }
            row.detail += std::to_string(compared) + " instances, " + std::to_string(feasible) + " feasible";
            rows.push_back(row);
        }

        const auto solution = try_solve(scene, cfg);
        {
            ValidationRow equality{"proposition1_equality", true, ""};
            ValidationRow dominance{"proposition1_dominance", true, ""};
            if (!solution)
            {
                equality.detail = dominance.detail = "skipped: infeasible under " + std::string(to_string(cfg.mode));
            }
            else
            {
                const auto report = verify_proposition1(scene, cfg, solution->forest, options.seed, 100, options.beta_fault);
                equality.passed = report.equality_ok;
                equality.detail = "relative error " + format_number(report.equality.relative_error);
                dominance.passed = report.dominance_ok;
                dominance.detail = std::to_string(report.draws) + " draws, worst ratio " + format_number(report.worst_draw_ratio);
            }
            rows.push_back(equality);
            rows.push_back(dominance);
        }

        {
            ValidationRow row{"mode_monotonicity", true, ""};
            std::vector<std::optional<double>> objectives;
            for (auto mode : {SolverMode::StarEs, SolverMode::StarMs, SolverMode::ReflectOnly})
            {
                SystemConfig c = cfg;
                c.mode = mode;
                const auto s = try_solve(scene, c);
                objectives.push_back(s ? std::optional<double>(s->objective) : std::nullopt);
            }
            for (std::size_t i = 0; i + 1 < objectives.size(); ++i)
            {
                // A feasible weaker mode implies a feasible stronger one with at least its objective
                if (objectives[i + 1] && (!objectives[i] || *objectives[i] < *objectives[i + 1]))
                    row.passed = false;
            }
            for (std::size_t i = 0; i < objectives.size(); ++i)
                row.detail += (i ? " >= " : "") + (objectives[i] ? format_number(to_db(*objectives[i])) + " dB" : std::string("infeasible"));
            rows.push_back(row);
        }

        {
            ValidationRow row{"equalization", true, ""};
            if (!solution)
                row.detail = "skipped: infeasible";
            else
            {
                double worst = 0.0;
                const auto &fr = solution->designs.power.user_fractions;
                for (std::size_t k = 0; k < fr.size(); ++k)
                    worst = std::max(worst, std::abs(fr[k] * solution->user_gains[k] - solution->objective) / solution->objective);
                row.passed = worst < 1e-12;
                row.detail = "max deviation " + format_number(worst);
            }
            rows.push_back(row);
        }

        {
            ValidationRow row{"channel_rank_one", true, ""};
            if (!solution)
                row.detail = "skipped: infeasible";
            else
            {
                std::set<std::pair<NodeId, NodeId>> hops;
                for (const auto &p : solution->paths)
                {
                    const auto nodes = p.nodes();
                    for (std::size_t l = 0; l + 1 < nodes.size(); ++l)
                        hops.insert({nodes[l], nodes[l + 1]});
                }
                double worst = 0.0;
                for (auto [a, b] : hops)
                {
                    CMat m;
                    if (a == kBsNode)
                        m = bs_ris_channel(scene, cfg, b);
                    else if (scene.is_user(b))
                        m = ris_user_channel(scene, cfg, a, b);
                    else
                        m = ris_ris_channel(scene, cfg, a, b);
                    worst = std::max(worst, singular_value_ratio(m));
                }
                row.passed = worst < 1e-10;
                row.detail = std::to_string(hops.size()) + " hops, worst sigma2/sigma1 " + format_number(worst);
            }
            rows.push_back(row);
        }
        return rows;
    }

    std::string validation_table(const std::vector<ValidationRow> &rows)
    {
        std::ostringstream out;
        out << std::left << std::setw(26) << "property" << std::setw(7) << "result" << "detail\n";
        for (const auto &r : rows)
            out << std::left << std::setw(26) << r.property << std::setw(7) << (r.passed ? "PASS" : "FAIL") << r.detail << "\n";
        return out.str();
    }

    int cmd_validate(const std::filesystem::path &scene_path, const std::filesystem::path &config_path,
                     const ValidateOptions &options, std::ostream &out, std::ostream &err)
    {
        std::vector<ValidationRow> rows;
        try
        {
            const auto scene = load_scene_file(scene_path);
            const auto cfg = load_config_file(config_path);
            rows = run_validation(scene, cfg, options);
        }
        catch (const std::exception &e)
        {
            err << "validate: " << e.what() << "\n";
            return kExitInputError;
        }
        out << validation_table(rows);
        int code = kExitOk;
        for (const auto &r : rows)
            if (!r.passed)
            {
                err << "validate: failed: " << r.property << "\n";
                code = kExitOracleFailure;
            }
        return code;
    }
}
