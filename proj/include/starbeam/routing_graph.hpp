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

#ifndef STARBEAM_ROUTING_GRAPH_HPP
#define STARBEAM_ROUTING_GRAPH_HPP

#include "starbeam/channel.hpp"

#include <span>
#include <vector>

namespace starbeam
{
    struct WeightedEdge
    {
        NodeId from = 0;
        NodeId to = 0;
        double distance = 0.0; // [m]
        double weight = 0.0;   // ln(d / (M sqrt(gamma))) for LoS graphs, arbitrary for hand-built graphs
    };

    // Directed acyclic graph over node ids 0..num_vertices-1
    class LosGraph
    {
    public:
        LosGraph(int num_vertices, std::vector<WeightedEdge> edges);

        int num_vertices() const { return num_vertices_; }
        const std::vector<WeightedEdge> &edges() const { return edges_; } // sorted by (from, to)
        std::span<const WeightedEdge> out_edges(NodeId v) const;
        const WeightedEdge *find_edge(NodeId from, NodeId to) const;
        bool has_edge(NodeId from, NodeId to) const { return find_edge(from, to) != nullptr; }
        const std::vector<NodeId> &topological_order() const { return topo_; }

    private:
        int num_vertices_ = 0;
        std::vector<WeightedEdge> edges_;
        std::vector<std::size_t> offsets_; // CSR offsets into edges_
        std::vector<NodeId> topo_;
    };

    // Full vertex sequence source .. target with its weight
    struct PathStub
    {
        std::vector<NodeId> nodes;
        double weight = 0.0;
    };

    double edge_weight(double distance, double scale); // ln(d / scale)

    // Edge (i, j) iff LoS pair, i is not a user, j is not the BS, and j is a user or farther from the BS than i.
    // Direct BS -> user links and hops at grazing incidence are left out.
    LosGraph build_los_graph(const Scene &scene, const SystemConfig &cfg);

    // Sum of edge weights folded from the target end; every routine uses this summation order
    double path_weight(const LosGraph &graph, std::span<const NodeId> nodes);

    // Up to S loopless paths of minimum weight, nondecreasing weight, ties broken by lexicographic node sequence
    std::vector<PathStub> yen_k_shortest(const LosGraph &graph, NodeId source, NodeId target, int S);

    // Exhaustive DFS over loopless paths with at most max_hops edges, in lexicographic order
    std::vector<PathStub> enumerate_all_paths(const LosGraph &graph, NodeId source, NodeId target, int max_hops);

    bool stub_less(const PathStub &a, const PathStub &b);

    // Yen's paths towards one user turned into CandidatePaths (BS and user stripped)
    std::vector<CandidatePath> candidate_paths(const Scene &scene, const SystemConfig &cfg, const LosGraph &graph, NodeId user, int S);

    std::string dump_graph(const LosGraph &graph);
}

#endif
