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

#ifndef STARBEAM_SPLITTING_HPP
#define STARBEAM_SPLITTING_HPP

#include "starbeam/channel.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace starbeam
{
    enum class ForestViolationKind
    {
        EmptyPathSet,
        DuplicatePath,
        InDegreeViolation,
        OutDegreeViolation,
        SideViolation,
        CrossUserSharing,
        PrefixMismatch
    };

    std::string_view to_string(ForestViolationKind kind);

    struct ForestViolation
    {
        ForestViolationKind kind = ForestViolationKind::EmptyPathSet;
        NodeId node = -1;
        std::string message;
    };

    class ForestError : public std::runtime_error
    {
    public:
        explicit ForestError(ForestViolation v) : std::runtime_error(v.message), violation_(std::move(v)) {}
        const ForestViolation &violation() const { return violation_; }

    private:
        ForestViolation violation_;
    };

    class InfeasibleError : public std::runtime_error
    {
    public:
        InfeasibleError(const std::string &what, std::vector<NodeId> users) : std::runtime_error(what), users_(std::move(users)) {}
        const std::vector<NodeId> &users() const { return users_; }

    private:
        std::vector<NodeId> users_;
    };

    inline std::size_t surface_index(Surface s) { return s == Surface::Reflect ? 0 : 1; }

    // Per-panel bookkeeping of a forest
    struct ForestNode
    {
        NodeId owner = 0;                       // user served through this panel
        NodeId predecessor = 0;                 // unique previous node
        std::vector<NodeId> successors;         // one or two next nodes, ascending
        std::array<NodeId, 2> surface_next{-1, -1};           // next node per surface (R, T), -1 if unused
        std::array<std::vector<std::size_t>, 2> psi;          // member paths through the R / T surface

        int in_degree() const { return 1; }
        int out_degree() const { return static_cast<int>(successors.size()); }
        bool uses(Surface s) const { return surface_next[surface_index(s)] >= 0; }
    };

    struct Beam
    {
        NodeId user = 0;
        NodeId first_ris = 0;
        std::vector<std::size_t> members; // indices into BeamForest::paths
    };

    // Union of selected paths arranged as per-beam trees rooted at the BS
    struct BeamForest
    {
        std::vector<CandidatePath> paths; // canonical order (user, panel sequence)
        std::vector<NodeId> users;        // users with at least one path, ascending
        std::vector<Beam> beams;          // ordered by (user, first panel)
        std::map<NodeId, ForestNode> nodes;
        std::vector<NodeId> branch_nodes; // out-degree two

        std::vector<double> f_hats() const;
        int num_beams(NodeId user) const;
        std::vector<std::size_t> beams_of(NodeId user) const;
    };

    // Non-throwing feasibility check of a path set; empty when the set forms a valid forest
    std::optional<ForestViolation> find_forest_violation(const Scene &scene, std::span<const CandidatePath> paths);

    BeamForest build_forest(const Scene &scene, std::span<const CandidatePath> paths);

    struct SurfaceAmplitudes
    {
        double reflect = 0.0;
        double transmit = 0.0;

        double operator[](Surface s) const { return s == Surface::Reflect ? reflect : transmit; }
    };

    using AmplitudeAssignment = std::map<NodeId, SurfaceAmplitudes>;

    struct PowerAllocation
    {
        std::vector<NodeId> users;
        std::vector<double> user_fractions; // alpha_k, sums to 1
        std::vector<double> beam_fractions; // per beam, relative to its user, sums to 1 within each user
    };

    // f_hats are parallel to forest.paths
    AmplitudeAssignment optimal_amplitudes(const BeamForest &forest, std::span<const double> f_hats);
    AmplitudeAssignment optimal_amplitudes(const BeamForest &forest);

    // Per-beam split alpha_q = Gamma_q^2 / sum Gamma^2 for every user of the forest; user fractions are left at 1 / 0
    std::vector<double> beam_power_allocation(const BeamForest &forest, std::span<const double> f_hats);

    double predicted_power_single(const BeamForest &forest, std::span<const double> f_hats);

    struct UserPowerSplit
    {
        std::vector<double> fractions; // alpha_k
        double power = 0.0;            // common received power
    };

    // Max-min split over users with per-user gains G_k: alpha_k proportional to 1 / G_k
    UserPowerSplit user_power_allocation(std::span<const double> gains);

    // Sum of F_hat per user in the forest's canonical order, parallel to forest.users
    std::vector<double> user_gains(const BeamForest &forest, std::span<const double> f_hats);

    double realized_path_gain(const CandidatePath &path, const AmplitudeAssignment &amplitudes);

    using SurfaceKey = std::pair<NodeId, Surface>;

    // Closed-form designs for a forest: beamformers, phases with coherence rotation, amplitudes, power split
    struct DesignSet
    {
        std::map<NodeId, Beamformer> beamformers; // keyed by first panel
        std::map<SurfaceKey, PhaseProfile> phases;
        AmplitudeAssignment amplitudes;
        PowerAllocation power;
        std::vector<double> predicted_power; // per user, parallel to power.users
    };

    DesignSet compute_designs(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest);
}

#endif
