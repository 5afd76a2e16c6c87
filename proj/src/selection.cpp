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

#include "starbeam/selection.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>

namespace starbeam
{
    namespace
    {
        using Bits = std::vector<std::uint64_t>;

        bool any(const Bits &b)
        {
            return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
        }

        Bits intersect(const Bits &a, const Bits &b)
        {
            Bits out(a.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                out[i] = a[i] & b[i];
            return out;
        }

        std::size_t popcount_and(const Bits &a, const Bits &b)
        {
            std::size_t n = 0;
            for (std::size_t i = 0; i < a.size(); ++i)
                n += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
            return n;
        }

        bool test(const Bits &b, std::size_t i) { return (b[i / 64] >> (i % 64)) & 1u; }
        void set(Bits &b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }
        void reset(Bits &b, std::size_t i) { b[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

        template <typename F>
        void for_each_bit(const Bits &b, F &&f)
        {
            for (std::size_t w = 0; w < b.size(); ++w)
            {
                std::uint64_t word = b[w];
                while (word)
                {
                    const auto bit = static_cast<std::size_t>(std::countr_zero(word));
                    f(w * 64 + bit);
                    word &= word - 1;
                }
            }
        }

        void expand(const AdjacencyMatrix &g, std::vector<std::size_t> &clique, Bits candidates, Bits excluded,
                    std::vector<std::vector<std::size_t>> &out)
        {
            if (!any(candidates))
            {
                if (!any(excluded))
                {
                    auto c = clique;
                    std::sort(c.begin(), c.end());
                    out.push_back(std::move(c));
                }
                return;
            }

            // Pivot maximizing |P ∩ N(u)| over P ∪ X, smallest index on ties
            std::size_t pivot = 0, best = 0;
            bool found = false;
            auto consider = [&](std::size_t u)
            {
                const auto score = popcount_and(candidates, g.row(u));
                if (!found || score > best)
                {
                    pivot = u;
                    best = score;
                    found = true;
                }
            };
            Bits pool(candidates.size());
            for (std::size_t i = 0; i < pool.size(); ++i)
                pool[i] = candidates[i] | excluded[i];
            for_each_bit(pool, consider);

            Bits branch(candidates.size());
            for (std::size_t i = 0; i < branch.size(); ++i)
                branch[i] = candidates[i] & ~g.row(pivot)[i];

            std::vector<std::size_t> order;
            for_each_bit(branch, [&](std::size_t v) { order.push_back(v); });
            for (std::size_t v : order)
            {
                clique.push_back(v);
                expand(g, clique, intersect(candidates, g.row(v)), intersect(excluded, g.row(v)), out);
                clique.pop_back();
                reset(candidates, v);
                set(excluded, v);
            }
        }

        bool disjoint(const CandidatePath &a, const CandidatePath &b)
        {
            for (NodeId j : a.ris_sequence)
                if (std::find(b.ris_sequence.begin(), b.ris_sequence.end(), j) != b.ris_sequence.end())
                    return false;
            return true;
        }

        int total_hops(std::span<const CandidatePath> paths)
        {
            int hops = 0;
            for (const auto &p : paths)
                hops += p.num_ris() + 1;
            return hops;
        }

        std::vector<CandidatePath> sorted_copy(std::span<const CandidatePath> paths)
        {
            std::vector<CandidatePath> out(paths.begin(), paths.end());
            std::sort(out.begin(), out.end(), path_less);
            return out;
        }

        struct Ranked
        {
            std::vector<std::vector<CandidatePath>> paths;
            std::vector<std::vector<int>> ranks;
        };

        Ranked ranked_candidates(const Scene &scene, const SystemConfig &cfg, std::span<const NodeId> users)
        {
            const auto graph = build_los_graph(scene, cfg);
            Ranked out;
            for (NodeId user : users)
            {
                auto all = candidate_paths(scene, cfg, graph, user, cfg.candidates_per_user);
                std::vector<CandidatePath> kept;
                std::vector<int> rank;
                for (std::size_t i = 0; i < all.size(); ++i)
                    if (admissible_path(all[i], cfg.mode, scene))
                    {
                        kept.push_back(std::move(all[i]));
                        rank.push_back(static_cast<int>(i) + 1);
                    }
                out.paths.push_back(std::move(kept));
                out.ranks.push_back(std::move(rank));
            }
            return out;
        }

        struct Incumbent
        {
            std::vector<std::size_t> clique;
            std::vector<CandidatePath> paths;
            double objective = 0.0;
        };

        Solution finish(const Scene &scene, const SystemConfig &cfg, const PathGraph &pg, const Incumbent &best, CliqueStats stats)
        {
            Solution sol = design_solution(scene, cfg, best.paths);
            for (auto v : best.clique)
                if (pg.rank[v] == cfg.candidates_per_user)
                    sol.candidate_limit_binding = true;
            sol.stats = stats;
            return sol;
        }
    }

    AdjacencyMatrix::AdjacencyMatrix(std::size_t n) : n_(n), rows_(n, std::vector<std::uint64_t>((n + 63) / 64, 0)) {}

    void AdjacencyMatrix::connect(std::size_t a, std::size_t b)
    {
        if (a == b)
            throw std::invalid_argument("AdjacencyMatrix: self-loop");
        set(rows_[a], b);
        set(rows_[b], a);
    }

    bool AdjacencyMatrix::adjacent(std::size_t a, std::size_t b) const { return test(rows_[a], b); }

    std::size_t AdjacencyMatrix::num_edges() const
    {
        std::size_t n = 0;
        for (const auto &r : rows_)
            for (auto w : r)
                n += static_cast<std::size_t>(std::popcount(w));
        return n / 2;
    }

    bool compatible(const CandidatePath &a, const CandidatePath &b, SolverMode mode, const Scene &scene)
    {
        if (a.user != b.user || mode != SolverMode::StarEs)
            return disjoint(a, b);

        const auto na = a.nodes();
        const auto nb = b.nodes();
        for (std::size_t la = 1; la + 1 < na.size(); ++la)
        {
            const auto it = std::find(nb.begin() + 1, nb.end() - 1, na[la]);
            if (it == nb.end() - 1)
                continue;
            const auto lb = static_cast<std::size_t>(it - nb.begin());
            if (na[la - 1] != nb[lb - 1])
                return false;
            // With one predecessor everywhere the two prefixes must coincide
            if (la != lb || !std::equal(na.begin(), na.begin() + static_cast<std::ptrdiff_t>(la), nb.begin()))
                return false;
            const NodeId next_a = na[la + 1];
            const NodeId next_b = nb[lb + 1];
            if (next_a != next_b && !(side_cosine(scene, next_a, na[la]) * side_cosine(scene, next_b, na[la]) < 0.0))
                return false;
        }
        return true;
    }

    bool admissible_path(const CandidatePath &path, SolverMode mode, const Scene &scene)
    {
        if (mode != SolverMode::ReflectOnly)
            return true;
        const auto nodes = path.nodes();
        for (std::size_t l = 1; l + 1 < nodes.size(); ++l)
            if (!on_front_side(scene, nodes[l - 1], nodes[l]) || !on_front_side(scene, nodes[l + 1], nodes[l]))
                return false;
        return true;
    }

    PathGraph build_path_graph(const std::vector<std::vector<CandidatePath>> &candidates, SolverMode mode, const Scene &scene)
    {
        PathGraph pg;
        pg.mode = mode;
        for (const auto &per_user : candidates)
            for (std::size_t i = 0; i < per_user.size(); ++i)
            {
                pg.vertices.push_back(per_user[i]);
                pg.rank.push_back(static_cast<int>(i) + 1);
            }
        pg.adjacency = AdjacencyMatrix(pg.vertices.size());
        for (std::size_t a = 0; a < pg.vertices.size(); ++a)
            for (std::size_t b = a + 1; b < pg.vertices.size(); ++b)
                if (compatible(pg.vertices[a], pg.vertices[b], mode, scene))
                    pg.adjacency.connect(a, b);
        return pg;
    }

    std::vector<std::vector<std::size_t>> bron_kerbosch(const AdjacencyMatrix &graph)
    {
        std::vector<std::vector<std::size_t>> out;
        if (graph.size() == 0)
            return out;
        const std::size_t words = (graph.size() + 63) / 64;
        Bits candidates(words, 0);
        for (std::size_t v = 0; v < graph.size(); ++v)
            set(candidates, v);
        std::vector<std::size_t> clique;
        expand(graph, clique, std::move(candidates), Bits(words, 0), out);
        return out;
    }

    double selection_objective(std::span<const CandidatePath> paths, std::span<const NodeId> users)
    {
        const auto sorted = sorted_copy(paths);
        std::vector<double> gains(users.size(), 0.0);
        for (const auto &p : sorted)
        {
            const auto it = std::find(users.begin(), users.end(), p.user);
            if (it != users.end())
                gains[static_cast<std::size_t>(it - users.begin())] += p.f_hat;
        }
        if (gains.size() == 1)
            return gains[0];
        double inverse_sum = 0.0;
        for (double g : gains)
        {
            if (!(g > 0.0))
                return 0.0;
            inverse_sum += 1.0 / g;
        }
        return 1.0 / inverse_sum;
    }

    bool preferred_selection(double objective_a, std::span<const CandidatePath> a, double objective_b, std::span<const CandidatePath> b)
    {
        if (objective_a != objective_b)
            return objective_a > objective_b;
        const int hops_a = total_hops(a), hops_b = total_hops(b);
        if (hops_a != hops_b)
            return hops_a < hops_b;
        const auto sa = sorted_copy(a), sb = sorted_copy(b);
        return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end(), path_less);
    }

    bool same_solution(const Solution &a, const Solution &b)
    {
        if (a.mode != b.mode || a.candidates_per_user != b.candidates_per_user || a.paths.size() != b.paths.size())
            return false;
        for (std::size_t i = 0; i < a.paths.size(); ++i)
            if (!same_route(a.paths[i], b.paths[i]) || a.paths[i].f_hat != b.paths[i].f_hat)
                return false;
        if (a.objective != b.objective || a.user_gains != b.user_gains || a.candidate_limit_binding != b.candidate_limit_binding)
            return false;
        if (a.stats.candidates != b.stats.candidates || a.stats.edges != b.stats.edges || a.stats.maximal_cliques != b.stats.maximal_cliques)
            return false;
        const auto &da = a.designs, &db = b.designs;
        if (da.power.user_fractions != db.power.user_fractions || da.power.beam_fractions != db.power.beam_fractions ||
            da.predicted_power != db.predicted_power || da.amplitudes.size() != db.amplitudes.size() || da.phases.size() != db.phases.size())
            return false;
        for (auto ia = da.amplitudes.begin(), ib = db.amplitudes.begin(); ia != da.amplitudes.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second.reflect != ib->second.reflect || ia->second.transmit != ib->second.transmit)
                return false;
        for (auto ia = da.phases.begin(), ib = db.phases.begin(); ia != da.phases.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second.phases != ib->second.phases || ia->second.extra_rotation != ib->second.extra_rotation)
                return false;
        for (auto ia = da.beamformers.begin(), ib = db.beamformers.begin(); ia != da.beamformers.end(); ++ia, ++ib)
            if (ia->first != ib->first || ia->second.weights != ib->second.weights)
                return false;
        return true;
    }

    Solution design_solution(const Scene &scene, const SystemConfig &cfg, std::span<const CandidatePath> paths)
    {
        Solution sol;
        sol.mode = cfg.mode;
        sol.candidates_per_user = cfg.candidates_per_user;
        sol.forest = build_forest(scene, paths);
        sol.paths = sol.forest.paths;
        sol.designs = compute_designs(scene, cfg, sol.forest);
        sol.user_gains = user_gains(sol.forest, sol.forest.f_hats());
        sol.objective = sol.designs.predicted_power.front();
        return sol;
    }

    std::vector<std::vector<CandidatePath>> admissible_candidates(const Scene &scene, const SystemConfig &cfg, std::span<const NodeId> users)
    {
        return ranked_candidates(scene, cfg, users).paths;
    }

    Solution solve_single_user(const Scene &scene, const SystemConfig &cfg, std::optional<NodeId> user)
    {
        const auto start = std::chrono::steady_clock::now();
        const NodeId target = user.value_or(scene.user_node(1));
        if (!scene.is_user(target))
            throw std::invalid_argument("node " + std::to_string(target) + " is not a user");
        const std::vector<NodeId> users{target};

        const auto ranked = ranked_candidates(scene, cfg, users);
        if (ranked.paths.front().empty())
            throw NoPathError("no admissible path reaches user " + std::to_string(target), users);

        PathGraph pg = build_path_graph(ranked.paths, cfg.mode, scene);
        pg.rank = ranked.ranks.front();
        const auto cliques = bron_kerbosch(pg.adjacency);

        Incumbent best;
        bool have = false;
        for (const auto &c : cliques)
        {
            std::vector<CandidatePath> paths;
            for (auto v : c)
                paths.push_back(pg.vertices[v]);
            const double obj = selection_objective(paths, users);
            if (!have || preferred_selection(obj, paths, best.objective, best.paths))
            {
                best = {c, std::move(paths), obj};
                have = true;
            }
        }

        CliqueStats stats{pg.vertices.size(), pg.adjacency.num_edges(), cliques.size(), 0.0};
        stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return finish(scene, cfg, pg, best, stats);
    }

    Solution solve_multi_user(const Scene &scene, const SystemConfig &cfg)
    {
        const auto start = std::chrono::steady_clock::now();
        const auto users = scene.user_nodes();
        const auto ranked = ranked_candidates(scene, cfg, users);

        std::vector<NodeId> unreachable;
        for (std::size_t k = 0; k < users.size(); ++k)
            if (ranked.paths[k].empty())
                unreachable.push_back(users[k]);
        if (!unreachable.empty())
        {
            std::string names;
            for (NodeId u : unreachable)
                names += (names.empty() ? "" : ", ") + std::to_string(u);
            throw InfeasibleError("no admissible path reaches user(s) " + names, unreachable);
        }

        PathGraph pg = build_path_graph(ranked.paths, cfg.mode, scene);
        pg.rank.clear();
        for (const auto &r : ranked.ranks)
            pg.rank.insert(pg.rank.end(), r.begin(), r.end());
        const auto cliques = bron_kerbosch(pg.adjacency);

        Incumbent best;
        bool have = false;
        std::vector<NodeId> widest_missing = users;
        for (const auto &c : cliques)
        {
            std::vector<CandidatePath> paths;
            std::vector<NodeId> covered;
            for (auto v : c)
            {
                paths.push_back(pg.vertices[v]);
                covered.push_back(pg.vertices[v].user);
            }
            std::vector<NodeId> missing;
            for (NodeId u : users)
                if (std::find(covered.begin(), covered.end(), u) == covered.end())
                    missing.push_back(u);
            if (!missing.empty())
            {
                if (missing.size() < widest_missing.size())
                    widest_missing = missing;
                continue;
            }
            const double obj = selection_objective(paths, users);
            if (!have || preferred_selection(obj, paths, best.objective, best.paths))
            {
                best = {c, std::move(paths), obj};
                have = true;
            }
        }
        if (!have)
        {
            std::string names;
            for (NodeId u : widest_missing)
                names += (names.empty() ? "" : ", ") + std::to_string(u);
            throw InfeasibleError("no node-disjoint selection covers every user; uncovered: " + names, widest_missing);
        }

        CliqueStats stats{pg.vertices.size(), pg.adjacency.num_edges(), cliques.size(), 0.0};
        stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return finish(scene, cfg, pg, best, stats);
    }
}
