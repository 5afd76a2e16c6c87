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

#include "starbeam/routing_graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <set>

namespace starbeam
{
    namespace
    {
        struct Best
        {
            double weight = 0.0;
            std::vector<NodeId> nodes;
        };

        bool better(double w, const std::vector<NodeId> &seq, const Best &incumbent)
        {
            if (w != incumbent.weight)
                return w < incumbent.weight;
            return seq < incumbent.nodes;
        }

        // Lightest (then lexicographically smallest) path from source to target, skipping banned vertices and edges.
        // Backward dynamic program over the reverse topological order, exact for negative weights on a DAG.
        std::optional<Best> best_path(const LosGraph &graph, NodeId source, NodeId target,
                                      const std::vector<char> &banned_vertex,
                                      const std::set<std::pair<NodeId, NodeId>> &banned_edges)
        {
            std::vector<std::optional<Best>> best(static_cast<std::size_t>(graph.num_vertices()));
            best[static_cast<std::size_t>(target)] = Best{0.0, {target}};

            const auto &order = graph.topological_order();
            for (auto it = order.rbegin(); it != order.rend(); ++it)
            {
                const NodeId v = *it;
                if (v == target || banned_vertex[static_cast<std::size_t>(v)])
                    continue;
                std::optional<Best> incumbent;
                std::vector<NodeId> seq;
                for (const auto &e : graph.out_edges(v))
                {
                    const auto &next = best[static_cast<std::size_t>(e.to)];
                    if (!next || banned_vertex[static_cast<std::size_t>(e.to)] || banned_edges.count({e.from, e.to}))
                        continue;
                    const double w = e.weight + next->weight;
                    seq.assign(1, v);
                    seq.insert(seq.end(), next->nodes.begin(), next->nodes.end());
                    if (!incumbent || better(w, seq, *incumbent))
                        incumbent = Best{w, seq};
                }
                best[static_cast<std::size_t>(v)] = std::move(incumbent);
                if (v == source)
                    break;
            }
            return best[static_cast<std::size_t>(source)];
        }
    }

    LosGraph::LosGraph(int num_vertices, std::vector<WeightedEdge> edges)
        : num_vertices_(num_vertices), edges_(std::move(edges))
    {
        for (const auto &e : edges_)
        {
            if (e.from < 0 || e.to < 0 || e.from >= num_vertices_ || e.to >= num_vertices_ || e.from == e.to)
                throw std::invalid_argument("LosGraph: invalid edge " + std::to_string(e.from) + " -> " + std::to_string(e.to));
            if (!std::isfinite(e.weight))
                throw std::invalid_argument("LosGraph: non-finite edge weight");
        }
        std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge &a, const WeightedEdge &b)
                  { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (edges_[i].from == edges_[i - 1].from && edges_[i].to == edges_[i - 1].to)
                throw std::invalid_argument("LosGraph: duplicate edge");

        offsets_.assign(static_cast<std::size_t>(num_vertices_) + 1, 0);
        for (const auto &e : edges_)
            ++offsets_[static_cast<std::size_t>(e.from) + 1];
        for (std::size_t v = 0; v < static_cast<std::size_t>(num_vertices_); ++v)
            offsets_[v + 1] += offsets_[v];

        // Kahn's algorithm, smallest id first
        std::vector<int> indegree(static_cast<std::size_t>(num_vertices_), 0);
        for (const auto &e : edges_)
            ++indegree[static_cast<std::size_t>(e.to)];
        std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
        for (NodeId v = 0; v < num_vertices_; ++v)
            if (indegree[static_cast<std::size_t>(v)] == 0)
                ready.push(v);
        while (!ready.empty())
        {
            const NodeId v = ready.top();
            ready.pop();
            topo_.push_back(v);
            for (const auto &e : out_edges(v))
                if (--indegree[static_cast<std::size_t>(e.to)] == 0)
                    ready.push(e.to);
        }
        if (static_cast<int>(topo_.size()) != num_vertices_)
            throw std::invalid_argument("LosGraph: graph has a cycle");
    }

    std::span<const WeightedEdge> LosGraph::out_edges(NodeId v) const
    {
        const auto begin = offsets_[static_cast<std::size_t>(v)];
        const auto end = offsets_[static_cast<std::size_t>(v) + 1];
        return {edges_.data() + begin, end - begin};
    }

    const WeightedEdge *LosGraph::find_edge(NodeId from, NodeId to) const
    {
        if (from < 0 || from >= num_vertices_)
            return nullptr;
        for (const auto &e : out_edges(from))
            if (e.to == to)
                return &e;
        return nullptr;
    }

    double edge_weight(double distance, double scale)
    {
        if (!(distance > 0.0) || !(scale > 0.0))
            throw std::invalid_argument("edge_weight: distance and scale must be > 0");
        return std::log(distance / scale);
    }

    LosGraph build_los_graph(const Scene &scene, const SystemConfig &cfg)
    {
        std::vector<WeightedEdge> edges;
        // Per-hop gain gamma M^2 / d^2, so ln(d / (M sqrt(gamma))) keeps path sums in exact F_hat order
        const double scale = cfg.num_elements() * std::sqrt(cfg.gamma());

        auto bs_distance = [&](NodeId v) { return v == kBsNode ? 0.0 : distance(scene, kBsNode, v); };
        auto try_edge = [&](NodeId from, NodeId to)
        {
            if (scene.is_user(from) || to == kBsNode)
                return;
            if (from == kBsNode && scene.is_user(to))
                return;
            if (!scene.is_user(to) && !(bs_distance(to) > bs_distance(from)))
                return;
            if (scene.is_ris(from) && is_grazing(scene, to, from))
                return;
            if (scene.is_ris(to) && is_grazing(scene, from, to))
                return;
            const double d = distance(scene, from, to);
            edges.push_back({from, to, d, edge_weight(d, scale)});
        };

        for (auto [a, b] : scene.los_pairs())
        {
            try_edge(a, b);
            try_edge(b, a);
        }
        return LosGraph(scene.num_nodes(), std::move(edges));
    }

    double path_weight(const LosGraph &graph, std::span<const NodeId> nodes)
    {
        double w = 0.0;
        for (std::size_t i = nodes.size(); i-- > 1;)
        {
            const auto *e = graph.find_edge(nodes[i - 1], nodes[i]);
            if (!e)
                throw std::invalid_argument("path_weight: missing edge " + std::to_string(nodes[i - 1]) + " -> " + std::to_string(nodes[i]));
            w = e->weight + w;
        }
        return w;
    }

    bool stub_less(const PathStub &a, const PathStub &b)
    {
        if (a.weight != b.weight)
            return a.weight < b.weight;
        return a.nodes < b.nodes;
    }

    std::vector<PathStub> yen_k_shortest(const LosGraph &graph, NodeId source, NodeId target, int S)
    {
        if (S < 1)
            throw std::invalid_argument("yen_k_shortest: S must be >= 1");
        std::vector<PathStub> accepted;
        const auto n = static_cast<std::size_t>(graph.num_vertices());
        if (source < 0 || target < 0 || source >= graph.num_vertices() || target >= graph.num_vertices() || source == target)
            return accepted;

        std::vector<char> banned(n, 0);
        const auto first = best_path(graph, source, target, banned, {});
        if (!first)
            return accepted;
        accepted.push_back({first->nodes, first->weight});

        auto cmp = [](const PathStub &a, const PathStub &b) { return stub_less(a, b); };
        std::set<PathStub, decltype(cmp)> pending(cmp);
        std::set<std::vector<NodeId>> seen{first->nodes};

        while (static_cast<int>(accepted.size()) < S)
        {
            const PathStub last = accepted.back();
            for (std::size_t i = 0; i + 1 < last.nodes.size(); ++i)
            {
                const NodeId spur = last.nodes[i];
                const std::vector<NodeId> root(last.nodes.begin(), last.nodes.begin() + static_cast<std::ptrdiff_t>(i) + 1);

                std::set<std::pair<NodeId, NodeId>> banned_edges;
                for (const auto &p : accepted)
                    if (p.nodes.size() > i + 1 && std::equal(root.begin(), root.end(), p.nodes.begin()))
                        banned_edges.insert({p.nodes[i], p.nodes[i + 1]});

                std::fill(banned.begin(), banned.end(), 0);
                for (std::size_t r = 0; r < i; ++r)
                    banned[static_cast<std::size_t>(root[r])] = 1;

                const auto spur_path = best_path(graph, spur, target, banned, banned_edges);
                if (!spur_path)
                    continue;

                PathStub candidate;
                candidate.nodes = root;
                candidate.nodes.insert(candidate.nodes.end(), spur_path->nodes.begin() + 1, spur_path->nodes.end());
                if (seen.count(candidate.nodes))
                    continue;

                // Fold the root edges onto the spur weight so the sum matches path_weight bit for bit
                double w = spur_path->weight;
                for (std::size_t r = i; r-- > 0;)
                    w = graph.find_edge(root[r], root[r + 1])->weight + w;
                candidate.weight = w;
                seen.insert(candidate.nodes);
                pending.insert(std::move(candidate));
            }
            if (pending.empty())
                break;
            accepted.push_back(*pending.begin());
            pending.erase(pending.begin());
        }
        return accepted;
    }

    std::vector<PathStub> enumerate_all_paths(const LosGraph &graph, NodeId source, NodeId target, int max_hops)
    {
        if (max_hops < 1)
            throw std::invalid_argument("enumerate_all_paths: max_hops must be >= 1");
        std::vector<PathStub> out;
        std::vector<NodeId> stack{source};
        std::vector<char> on_stack(static_cast<std::size_t>(graph.num_vertices()), 0);
        on_stack[static_cast<std::size_t>(source)] = 1;

        auto dfs = [&](auto &&self, NodeId v) -> void
        {
            if (v == target)
            {
                out.push_back({stack, path_weight(graph, stack)});
                return;
            }
            if (static_cast<int>(stack.size()) - 1 >= max_hops)
                return;
            for (const auto &e : graph.out_edges(v))
            {
                if (on_stack[static_cast<std::size_t>(e.to)])
                    continue;
                on_stack[static_cast<std::size_t>(e.to)] = 1;
                stack.push_back(e.to);
                self(self, e.to);
                stack.pop_back();
                on_stack[static_cast<std::size_t>(e.to)] = 0;
            }
        };
        if (source != target)
            dfs(dfs, source);
        return out;
    }

    std::vector<CandidatePath> candidate_paths(const Scene &scene, const SystemConfig &cfg, const LosGraph &graph, NodeId user, int S)
    {
        std::vector<CandidatePath> out;
        for (const auto &stub : yen_k_shortest(graph, kBsNode, user, S))
        {
            std::vector<NodeId> seq(stub.nodes.begin() + 1, stub.nodes.end() - 1);
            out.push_back(path_metrics(scene, cfg, std::move(seq), user));
        }
        return out;
    }

    std::string dump_graph(const LosGraph &graph)
    {
        nlohmann::ordered_json doc;
        doc["num_vertices"] = graph.num_vertices();
        doc["edges"] = nlohmann::ordered_json::array();
        for (const auto &e : graph.edges())
        {
            nlohmann::ordered_json entry;
            entry["from"] = e.from;
            entry["to"] = e.to;
            entry["distance"] = e.distance;
            entry["weight"] = e.weight;
            doc["edges"].push_back(std::move(entry));
        }
        return doc.dump(2) + "\n";
    }
}
