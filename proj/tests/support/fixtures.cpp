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

#include <algorithm>

#ifndef STARBEAM_DATA_DIR
#define STARBEAM_DATA_DIR "data"
#endif

namespace starbeam::testing
{
    Scene random_scene(std::mt19937_64 &rng, const RandomSceneSpec &spec)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

        std::vector<Node> nodes;
        nodes.push_back({kBsNode, NodeKind::Bs, Vec3(0.0, 0.0, 2.5), std::nullopt});
        for (int j = 1; j <= spec.num_ris; ++j)
        {
            const double side = unit(rng) < 0.5 ? 1.0 : -1.0;
            const Vec3 pos(uniform(1.0, spec.corridor_length), side * uniform(1.0, 4.0), uniform(1.0, 3.5));
            nodes.push_back({j, NodeKind::StarRis, pos, Vec3(0.0, -side, 0.0)});
        }
        for (int k = 1; k <= spec.num_users; ++k)
        {
            const Vec3 pos(uniform(3.0, spec.corridor_length + 3.0), uniform(-5.0, 5.0), uniform(1.0, 2.0));
            nodes.push_back({spec.num_ris + k, NodeKind::User, pos, std::nullopt});
        }

        std::vector<NodePair> los;
        const int n = static_cast<int>(nodes.size());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
            {
                const bool user_pair = i > spec.num_ris && j > spec.num_ris;
                if (!user_pair && unit(rng) < spec.los_probability)
                    los.emplace_back(i, j);
            }
        return Scene(std::move(nodes), std::move(los));
    }

    Scene random_feasible_scene(std::mt19937_64 &rng, const RandomSceneSpec &spec, const SystemConfig &cfg)
    {
        for (;;)
        {
            Scene scene = random_scene(rng, spec);
            const auto graph = build_los_graph(scene, cfg);
            bool ok = true;
            for (NodeId u : scene.user_nodes())
                ok = ok && !candidate_paths(scene, cfg, graph, u, 1).empty();
            if (ok)
                return scene;
        }
    }

    SystemConfig random_config(std::mt19937_64 &rng, int max_m0, int max_nb, int max_s)
    {
        SystemConfig cfg;
        cfg.m0 = std::uniform_int_distribution<int>(1, max_m0)(rng);
        cfg.n_bs_antennas = std::uniform_int_distribution<int>(1, max_nb)(rng);
        cfg.candidates_per_user = std::uniform_int_distribution<int>(1, max_s)(rng);
        cfg.carrier_hz = std::uniform_real_distribution<double>(2e9, 30e9)(rng);
        return cfg;
    }

    LosGraph random_dag(std::mt19937_64 &rng, int num_inner, double edge_probability, bool integer_weights)
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<WeightedEdge> edges;
        const int sink = num_inner + 1;
        for (int i = 0; i <= num_inner; ++i)
            for (int j = i + 1; j <= sink; ++j)
            {
                if (i == 0 && j == sink)
                    continue;
                if (unit(rng) >= edge_probability)
                    continue;
                const double w = integer_weights ? static_cast<double>(std::uniform_int_distribution<int>(-2, 3)(rng))
                                                 : std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
                edges.push_back({i, j, 1.0, w});
            }
        return LosGraph(sink + 1, std::move(edges));
    }

    Scene two_beam_scene()
    {
        std::vector<Node> nodes{
            {0, NodeKind::Bs, Vec3(0.0, 0.0, 0.0), std::nullopt},
            {1, NodeKind::StarRis, Vec3(2.0, 1.0, 0.0), Vec3(0.0, -1.0, 0.0)},
            {2, NodeKind::StarRis, Vec3(4.0, 3.0, 0.0), Vec3(0.0, -1.0, 0.0)},
            {3, NodeKind::StarRis, Vec3(6.0, 5.0, 0.0), Vec3(0.0, -1.0, 0.0)},
            {4, NodeKind::StarRis, Vec3(4.0, -1.0, 0.0), Vec3(0.0, 1.0, 0.0)},
            {5, NodeKind::StarRis, Vec3(-2.0, 2.0, 0.0), Vec3(0.0, -1.0, 0.0)},
            {6, NodeKind::StarRis, Vec3(-1.0, -4.0, 0.0), Vec3(0.0, 1.0, 0.0)},
            {7, NodeKind::User, Vec3(10.0, -3.0, 0.0), std::nullopt},
        };
        std::vector<NodePair> los{{0, 1}, {1, 2}, {2, 3}, {3, 7}, {2, 7}, {1, 4}, {4, 7}, {0, 5}, {5, 6}, {6, 7}};
        return Scene(std::move(nodes), std::move(los));
    }

    std::filesystem::path data_dir() { return STARBEAM_DATA_DIR; }
}
