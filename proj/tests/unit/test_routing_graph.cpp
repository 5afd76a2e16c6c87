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

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace starbeam;

namespace
{
    LosGraph diamond()
    {
        return LosGraph(4, {{0, 1, 1.0, 1.0}, {1, 3, 1.0, 1.0}, {0, 2, 1.0, 2.0}, {2, 3, 1.0, 2.0}});
    }

    std::vector<std::vector<NodeId>> routes(const std::vector<PathStub> &stubs)
    {
        std::vector<std::vector<NodeId>> out;
        for (const auto &s : stubs)
            out.push_back(s.nodes);
        return out;
    }
}

TEST_CASE("edge weight")
{
    CHECK(edge_weight(10.0, 196.0) == doctest::Approx(-2.9755).epsilon(1e-4));
    CHECK(edge_weight(10.0, 196.0) == std::log(10.0 / 196.0));
    CHECK(edge_weight(196.0, 196.0) == 0.0);
    CHECK(edge_weight(3.0, 7.0) < edge_weight(4.0, 7.0));
    CHECK_THROWS_AS(edge_weight(0.0, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(edge_weight(1.0, -4.0), std::invalid_argument);
}

TEST_CASE("LoS graph orientation rules")
{
    // 1 and 2 equidistant from the BS, 3 farther
    const Scene s({{0, NodeKind::Bs, Vec3::Zero(), std::nullopt},
                   {1, NodeKind::StarRis, Vec3(3, 4, 0), Vec3(0, -1, 0)},
                   {2, NodeKind::StarRis, Vec3(3, -4, 0), Vec3(0, 1, 0)},
                   {3, NodeKind::StarRis, Vec3(8, 3, 1), Vec3(0, -1, 0)},
                   {4, NodeKind::User, Vec3(1, 6, 0), std::nullopt}},
                  {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}, {3, 4}, {1, 4}, {0, 4}});
    const auto g = build_los_graph(s, SystemConfig{});
    CHECK_FALSE(g.has_edge(1, 2));
    CHECK_FALSE(g.has_edge(2, 1));
    CHECK(g.has_edge(1, 3));
    CHECK_FALSE(g.has_edge(3, 1));
    // panel -> user kept even though the user is closer to the BS than panel 3
    CHECK(g.has_edge(3, 4));
    CHECK(g.has_edge(1, 4));
    CHECK_FALSE(g.has_edge(4, 1));
    CHECK_FALSE(g.has_edge(0, 4));
    for (const auto &e : g.edges())
    {
        CHECK(e.to != kBsNode);
        CHECK_FALSE(s.is_user(e.from));
    }
    CHECK(std::is_sorted(g.edges().begin(), g.edges().end(),
                         [](const auto &a, const auto &b) { return std::pair(a.from, a.to) < std::pair(b.from, b.to); }));
}

TEST_CASE("edge count matches a recount over the declared pairs")
{
    const Scene s = load_scene_file(testing::data_dir() / "multi_user_scene.json");
    const SystemConfig cfg;
    const auto g = build_los_graph(s, cfg);
    auto d0 = [&](NodeId v) { return v == 0 ? 0.0 : distance(s, 0, v); };
    std::size_t expected = 0;
    for (auto [a, b] : s.los_pairs())
        for (auto [i, j] : {std::pair{a, b}, std::pair{b, a}})
        {
            if (s.is_user(i) || j == 0 || (i == 0 && s.is_user(j)))
                continue;
            if (!s.is_user(j) && !(d0(j) > d0(i)))
                continue;
            if ((s.is_ris(i) && is_grazing(s, j, i)) || (s.is_ris(j) && is_grazing(s, i, j)))
                continue;
            ++expected;
        }
    CHECK(g.edges().size() == expected);
    CHECK(g.topological_order().size() == static_cast<std::size_t>(s.num_nodes()));
}

TEST_CASE("weight order equals reverse F_hat order")
{
    for (const char *file : {"single_user_scene.json", "multi_user_scene.json"})
    {
        const Scene s = load_scene_file(testing::data_dir() / file);
        for (int m0 : {2, 14, 24})
        {
            SystemConfig cfg;
            cfg.m0 = m0;
            const auto g = build_los_graph(s, cfg);
            for (NodeId u : s.user_nodes())
            {
                auto all = enumerate_all_paths(g, 0, u, s.num_nodes());
                std::sort(all.begin(), all.end(), stub_less);
                double prev = INFINITY;
                for (const auto &p : all)
                {
                    const auto m = path_metrics(s, cfg, std::vector<NodeId>(p.nodes.begin() + 1, p.nodes.end() - 1), u);
                    CHECK(m.f_hat <= prev * (1 + 1e-12));
                    prev = m.f_hat;
                }
            }
        }
    }
}

TEST_CASE("Yen on small graphs")
{
    const auto g = diamond();
    CHECK(routes(yen_k_shortest(g, 0, 3, 2)) == std::vector<std::vector<NodeId>>{{0, 1, 3}, {0, 2, 3}});
    CHECK(yen_k_shortest(g, 0, 3, 10).size() == 2);
    CHECK(yen_k_shortest(g, 0, 3, 1).front().weight == 2.0);

    const LosGraph unreachable(3, {{0, 1, 1.0, 1.0}});
    CHECK(yen_k_shortest(unreachable, 0, 2, 3).empty());
    CHECK_THROWS_AS(yen_k_shortest(g, 0, 3, 0), std::invalid_argument);

    // equal weights fall back to lexicographic order
    const LosGraph tied(4, {{0, 1, 1.0, 1.0}, {1, 3, 1.0, 1.0}, {0, 2, 1.0, 1.0}, {2, 3, 1.0, 1.0}});
    CHECK(routes(yen_k_shortest(tied, 0, 3, 2)) == std::vector<std::vector<NodeId>>{{0, 1, 3}, {0, 2, 3}});
}

TEST_CASE("exhaustive enumeration")
{
    CHECK(enumerate_all_paths(diamond(), 0, 3, 5).size() == 2);
    const LosGraph chain(4, {{0, 1, 1, 0.1}, {1, 2, 1, 0.1}, {2, 3, 1, 0.1}});
    CHECK(enumerate_all_paths(chain, 0, 3, 5).size() == 1);
    CHECK(enumerate_all_paths(chain, 0, 3, 2).empty());
    const LosGraph layered(6, {{0, 1, 1, 1}, {0, 2, 1, 1}, {1, 3, 1, 1}, {1, 4, 1, 1}, {2, 3, 1, 1}, {2, 4, 1, 1},
                               {3, 5, 1, 1}, {4, 5, 1, 1}});
    CHECK(enumerate_all_paths(layered, 0, 5, 5).size() == 4);
    CHECK_THROWS_AS(enumerate_all_paths(chain, 0, 3, 0), std::invalid_argument);
}

TEST_CASE("Yen matches enumeration on random 8-node DAGs")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial)
    {
        const auto g = testing::random_dag(rng, 6, 0.55, trial % 2 == 0);
        auto all = enumerate_all_paths(g, 0, 7, 8);
        std::sort(all.begin(), all.end(), stub_less);
        const auto yen = yen_k_shortest(g, 0, 7, static_cast<int>(all.size()) + 3);
        REQUIRE(yen.size() == all.size());
        for (std::size_t i = 0; i < all.size(); ++i)
        {
            CHECK(yen[i].nodes == all[i].nodes);
            CHECK(yen[i].weight == all[i].weight);
        }
    }
}

TEST_CASE("graph rejects cycles and bad edges")
{
    CHECK_THROWS_AS(LosGraph(3, {{0, 1, 1, 0}, {1, 2, 1, 0}, {2, 1, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(LosGraph(2, {{0, 5, 1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(LosGraph(2, {{0, 1, 1, 0}, {0, 1, 1, 0}}), std::invalid_argument);
}

TEST_CASE("candidate paths are ranked by F_hat")
{
    const Scene s = load_scene_file(testing::data_dir() / "single_user_scene.json");
    const SystemConfig cfg = load_config_file(testing::data_dir() / "config.json");
    const auto c = candidate_paths(s, cfg, build_los_graph(s, cfg), s.user_node(1), 12);
    REQUIRE(c.size() == 12);
    for (std::size_t i = 1; i < c.size(); ++i)
        CHECK(c[i].f_hat <= c[i - 1].f_hat);
    CHECK(dump_graph(build_los_graph(s, cfg)).find("\"edges\"") != std::string::npos);
}
