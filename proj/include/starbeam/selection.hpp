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

#ifndef STARBEAM_SELECTION_HPP
#define STARBEAM_SELECTION_HPP

#include "starbeam/routing_graph.hpp"
#include "starbeam/splitting.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace starbeam
{
    // Raised when a single user has no admissible candidate path
    class NoPathError : public InfeasibleError
    {
    public:
        using InfeasibleError::InfeasibleError;
    };

    // Compact symmetric adjacency used for clique enumeration
    class AdjacencyMatrix
    {
    public:
        explicit AdjacencyMatrix(std::size_t n = 0);
        std::size_t size() const { return n_; }
        void connect(std::size_t a, std::size_t b);
        bool adjacent(std::size_t a, std::size_t b) const;
        const std::vector<std::uint64_t> &row(std::size_t a) const { return rows_[a]; }
        std::size_t num_edges() const;

    private:
        std::size_t n_ = 0;
        std::vector<std::vector<std::uint64_t>> rows_;
    };

    struct PathGraph
    {
        std::vector<CandidatePath> vertices; // per user, in Yen order
        std::vector<int> rank;               // 1-based candidate rank within its user
        AdjacencyMatrix adjacency;
        SolverMode mode = SolverMode::StarEs;
    };

    // Pairwise feasibility of two distinct candidates under the mode
    bool compatible(const CandidatePath &a, const CandidatePath &b, SolverMode mode, const Scene &scene);

    bool admissible_path(const CandidatePath &path, SolverMode mode, const Scene &scene);

    PathGraph build_path_graph(const std::vector<std::vector<CandidatePath>> &candidates, SolverMode mode, const Scene &scene);

    // All maximal cliques, Tomita pivoting, each clique ascending, cliques in discovery order
    std::vector<std::vector<std::size_t>> bron_kerbosch(const AdjacencyMatrix &graph);

    // Objective used by the solver and the brute-force oracle alike: sum of F_hat for one user,
    // 1 / sum_k G_k^-1 for several. Zero when a user in `users` has no path.
    double selection_objective(std::span<const CandidatePath> paths, std::span<const NodeId> users);

    // Deterministic preference among equal-objective selections: fewer total hops, then lexicographic paths
    bool preferred_selection(double objective_a, std::span<const CandidatePath> a, double objective_b, std::span<const CandidatePath> b);

    struct CliqueStats
    {
        std::size_t candidates = 0;
        std::size_t edges = 0;
        std::size_t maximal_cliques = 0;
        double wall_ms = 0.0;
    };

    struct Solution
    {
        SolverMode mode = SolverMode::StarEs;
        int candidates_per_user = 0;
        std::vector<CandidatePath> paths; // canonical order
        BeamForest forest;
        DesignSet designs;
        double objective = 0.0;                // sum F_hat (one user) or max-min power (several)
        std::vector<double> user_gains;        // G_k, parallel to designs.power.users
        CliqueStats stats;
        bool candidate_limit_binding = false;  // some selected path was the S-th candidate of its user
    };

    // Identical inputs give identical solutions apart from stats.wall_ms
    bool same_solution(const Solution &a, const Solution &b);

    Solution design_solution(const Scene &scene, const SystemConfig &cfg, std::span<const CandidatePath> paths);

    Solution solve_single_user(const Scene &scene, const SystemConfig &cfg, std::optional<NodeId> user = std::nullopt);
    Solution solve_multi_user(const Scene &scene, const SystemConfig &cfg);

    // Admissible candidates per user (Yen's top S, then filtered by mode)
    std::vector<std::vector<CandidatePath>> admissible_candidates(const Scene &scene, const SystemConfig &cfg, std::span<const NodeId> users);
}

#endif
