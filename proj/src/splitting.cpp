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

#include "starbeam/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace starbeam
{
    namespace
    {
        ForestViolation violation(ForestViolationKind kind, NodeId node, std::string message)
        {
            return {kind, node, std::move(message)};
        }

        std::vector<CandidatePath> canonical(std::span<const CandidatePath> paths)
        {
            std::vector<CandidatePath> sorted(paths.begin(), paths.end());
            std::sort(sorted.begin(), sorted.end(), path_less);
            return sorted;
        }

        struct NodeScan
        {
            NodeId owner = -1;
            std::set<NodeId> predecessors;
            std::set<NodeId> successors;
            std::array<std::set<NodeId>, 2> surface_next;
            std::vector<NodeId> prefix;
        };

        // Shared by the validator and the builder; paths must already be in canonical order
        std::optional<ForestViolation> scan(const Scene &scene, const std::vector<CandidatePath> &paths, std::map<NodeId, NodeScan> &nodes)
        {
            if (paths.empty())
                return violation(ForestViolationKind::EmptyPathSet, -1, "empty path set");
            for (std::size_t i = 1; i < paths.size(); ++i)
                if (same_route(paths[i - 1], paths[i]))
                    return violation(ForestViolationKind::DuplicatePath, paths[i].first_ris(), "path listed twice");

            for (const auto &path : paths)
            {
                const auto seq = path.nodes();
                for (std::size_t l = 1; l + 1 < seq.size(); ++l)
                {
                    const NodeId j = seq[l];
                    auto [it, fresh] = nodes.try_emplace(j);
                    NodeScan &ns = it->second;
                    if (fresh)
                    {
                        ns.owner = path.user;
                        ns.prefix.assign(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(l));
                    }
                    else if (ns.owner != path.user)
                        return violation(ForestViolationKind::CrossUserSharing, j,
                                         "panel " + std::to_string(j) + " is shared by users " + std::to_string(ns.owner) + " and " + std::to_string(path.user));

                    ns.predecessors.insert(seq[l - 1]);
                    ns.successors.insert(seq[l + 1]);
                    ns.surface_next[surface_index(path.hop_surfaces[l - 1])].insert(seq[l + 1]);

                    if (ns.predecessors.size() > 1)
                        return violation(ForestViolationKind::InDegreeViolation, j, "panel " + std::to_string(j) + " has two previous nodes");
                    if (ns.successors.size() > 2)
                        return violation(ForestViolationKind::OutDegreeViolation, j, "panel " + std::to_string(j) + " has more than two next nodes");
                    if (ns.successors.size() == 2)
                    {
                        const NodeId a = *ns.successors.begin();
                        const NodeId b = *ns.successors.rbegin();
                        if (side_cosine(scene, a, j) * side_cosine(scene, b, j) > 0.0)
                            return violation(ForestViolationKind::SideViolation, j,
                                             "next nodes " + std::to_string(a) + " and " + std::to_string(b) + " lie on the same side of panel " + std::to_string(j));
                    }
                    for (const auto &next : ns.surface_next)
                        if (next.size() > 1)
                            return violation(ForestViolationKind::SideViolation, j, "a surface of panel " + std::to_string(j) + " feeds two next nodes");
                    if (!std::equal(ns.prefix.begin(), ns.prefix.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(l)) || ns.prefix.size() != l)
                        return violation(ForestViolationKind::PrefixMismatch, j, "paths reach panel " + std::to_string(j) + " along different prefixes");
                }
            }
            return std::nullopt;
        }
    }

    std::string_view to_string(ForestViolationKind kind)
    {
        switch (kind)
        {
        case ForestViolationKind::EmptyPathSet:
            return "EmptyPathSet";
        case ForestViolationKind::DuplicatePath:
            return "DuplicatePath";
        case ForestViolationKind::InDegreeViolation:
            return "InDegreeViolation";
        case ForestViolationKind::OutDegreeViolation:
            return "OutDegreeViolation";
        case ForestViolationKind::SideViolation:
            return "SideViolation";
        case ForestViolationKind::CrossUserSharing:
            return "CrossUserSharing";
        case ForestViolationKind::PrefixMismatch:
            return "PrefixMismatch";
        }
        return "Unknown";
    }

    std::vector<double> BeamForest::f_hats() const
    {
        std::vector<double> out;
        out.reserve(paths.size());
        for (const auto &p : paths)
            out.push_back(p.f_hat);
        return out;
    }

    int BeamForest::num_beams(NodeId user) const
    {
        return static_cast<int>(std::count_if(beams.begin(), beams.end(), [&](const Beam &b) { return b.user == user; }));
    }

    std::vector<std::size_t> BeamForest::beams_of(NodeId user) const
    {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < beams.size(); ++q)
            if (beams[q].user == user)
                out.push_back(q);
        return out;
    }

    std::optional<ForestViolation> find_forest_violation(const Scene &scene, std::span<const CandidatePath> paths)
    {
        std::map<NodeId, NodeScan> nodes;
        return scan(scene, canonical(paths), nodes);
    }

    BeamForest build_forest(const Scene &scene, std::span<const CandidatePath> paths)
    {
        BeamForest forest;
        forest.paths = canonical(paths);

        std::map<NodeId, NodeScan> scanned;
        if (auto v = scan(scene, forest.paths, scanned))
            throw ForestError(std::move(*v));

        for (const auto &[j, ns] : scanned)
        {
            ForestNode fn;
            fn.owner = ns.owner;
            fn.predecessor = *ns.predecessors.begin();
            fn.successors.assign(ns.successors.begin(), ns.successors.end());
            for (std::size_t s = 0; s < 2; ++s)
                if (!ns.surface_next[s].empty())
                    fn.surface_next[s] = *ns.surface_next[s].begin();
            forest.nodes.emplace(j, std::move(fn));
            if (ns.successors.size() == 2)
                forest.branch_nodes.push_back(j);
        }

        for (std::size_t p = 0; p < forest.paths.size(); ++p)
        {
            const auto &path = forest.paths[p];
            for (std::size_t l = 0; l < path.ris_sequence.size(); ++l)
                forest.nodes.at(path.ris_sequence[l]).psi[surface_index(path.hop_surfaces[l])].push_back(p);

            if (forest.users.empty() || forest.users.back() != path.user)
                forest.users.push_back(path.user);

            auto beam = std::find_if(forest.beams.begin(), forest.beams.end(), [&](const Beam &b)
                                     { return b.user == path.user && b.first_ris == path.first_ris(); });
            if (beam == forest.beams.end())
                forest.beams.push_back({path.user, path.first_ris(), {p}});
            else
                beam->members.push_back(p);
        }
        return forest;
    }

    AmplitudeAssignment optimal_amplitudes(const BeamForest &forest, std::span<const double> f_hats)
    {
        if (f_hats.size() != forest.paths.size())
            throw std::invalid_argument("optimal_amplitudes: one F_hat per member path required");
        AmplitudeAssignment out;
        for (const auto &[j, fn] : forest.nodes)
        {
            double reflected = 0.0, transmitted = 0.0;
            for (auto p : fn.psi[0])
                reflected += f_hats[p];
            for (auto p : fn.psi[1])
                transmitted += f_hats[p];

            SurfaceAmplitudes beta;
            if (fn.uses(Surface::Reflect) && fn.uses(Surface::Transmit))
            {
                beta.reflect = reflected / (reflected + transmitted);
                beta.transmit = 1.0 - beta.reflect;
            }
            else if (fn.uses(Surface::Reflect))
                beta.reflect = 1.0;
            else
                beta.transmit = 1.0;
            out.emplace(j, beta);
        }
        return out;
    }

    AmplitudeAssignment optimal_amplitudes(const BeamForest &forest)
    {
        const auto f = forest.f_hats();
        return optimal_amplitudes(forest, f);
    }

    std::vector<double> beam_power_allocation(const BeamForest &forest, std::span<const double> f_hats)
    {
        std::vector<double> gamma_sq(forest.beams.size(), 0.0);
        for (std::size_t q = 0; q < forest.beams.size(); ++q)
            for (auto p : forest.beams[q].members)
                gamma_sq[q] += f_hats[p];

        std::vector<double> out(forest.beams.size(), 0.0);
        for (NodeId user : forest.users)
        {
            const auto qs = forest.beams_of(user);
            double total = 0.0;
            for (auto q : qs)
                total += gamma_sq[q];
            for (auto q : qs)
                out[q] = gamma_sq[q] / total;
        }
        return out;
    }

    double predicted_power_single(const BeamForest &forest, std::span<const double> f_hats)
    {
        double total = 0.0;
        for (std::size_t p = 0; p < forest.paths.size(); ++p)
            total += f_hats[p];
        return total;
    }

    std::vector<double> user_gains(const BeamForest &forest, std::span<const double> f_hats)
    {
        std::vector<double> out;
        for (NodeId user : forest.users)
        {
            double g = 0.0;
            for (std::size_t p = 0; p < forest.paths.size(); ++p)
                if (forest.paths[p].user == user)
                    g += f_hats[p];
            out.push_back(g);
        }
        return out;
    }

    UserPowerSplit user_power_allocation(std::span<const double> gains)
    {
        if (gains.empty())
            throw InfeasibleError("no users to serve", {});
        for (double g : gains)
            if (!(g > 0.0))
                throw InfeasibleError("some user has no path", {});

        UserPowerSplit out;
        if (gains.size() == 1)
        {
            out.fractions = {1.0};
            out.power = gains[0];
            return out;
        }
        double inverse_sum = 0.0;
        for (double g : gains)
            inverse_sum += 1.0 / g;
        for (double g : gains)
            out.fractions.push_back((1.0 / g) / inverse_sum);
        out.power = 1.0 / inverse_sum;
        return out;
    }

    double realized_path_gain(const CandidatePath &path, const AmplitudeAssignment &amplitudes)
    {
        double product = 1.0;
        for (std::size_t l = 0; l < path.ris_sequence.size(); ++l)
        {
            const auto it = amplitudes.find(path.ris_sequence[l]);
            if (it == amplitudes.end())
                throw std::invalid_argument("realized_path_gain: no amplitude for panel " + std::to_string(path.ris_sequence[l]));
            product *= it->second[path.hop_surfaces[l]];
        }
        return product * path.f_hat;
    }

    DesignSet compute_designs(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest)
    {
        DesignSet out;
        const auto f = forest.f_hats();
        out.amplitudes = optimal_amplitudes(forest, f);

        out.power.users = forest.users;
        out.power.beam_fractions = beam_power_allocation(forest, f);
        const auto split = user_power_allocation(user_gains(forest, f));
        out.power.user_fractions = split.fractions;
        out.predicted_power.assign(forest.users.size(), split.power);

        for (const auto &beam : forest.beams)
            out.beamformers.try_emplace(beam.first_ris, optimal_beamformer(scene, cfg, beam.first_ris));

        for (const auto &[j, fn] : forest.nodes)
            for (Surface s : {Surface::Reflect, Surface::Transmit})
                if (fn.uses(s))
                    out.phases.emplace(SurfaceKey{j, s}, optimal_phase_profile(scene, cfg, fn.predecessor, j, fn.surface_next[surface_index(s)]));

        // One coherence rotation per path, placed on its terminal surface (unique per path in a valid forest)
        std::set<SurfaceKey> rotated;
        for (const auto &path : forest.paths)
        {
            const SurfaceKey key{path.terminal_ris(), path.terminal_surface()};
            if (!rotated.insert(key).second)
                throw std::logic_error("two paths terminate on the same surface of panel " + std::to_string(key.first));
            out.phases.at(key).extra_rotation = wrap_phase(2.0 * std::numbers::pi * path.total_distance / cfg.wavelength());
        }
        return out;
    }
}
