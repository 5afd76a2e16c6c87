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

#ifndef STARBEAM_CHANNEL_HPP
#define STARBEAM_CHANNEL_HPP

#include "starbeam/scene.hpp"

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace starbeam
{
    using CVec = Eigen::VectorXcd;

    enum class Surface
    {
        Reflect,
        Transmit
    };

    std::string_view to_string(Surface s);

    // Raised for hops that are not LoS edges or that hit a panel at grazing incidence
    class PathError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    enum class ResponseRole
    {
        Arrival,  // wave impinging on the panel from the other node
        Departure // wave leaving the panel towards the other node
    };

    struct ArrayResponse
    {
        NodeId node = 0;
        CVec entries; // unit-modulus
    };

    // Maximum end-to-end gain and its ingredients for one cascaded path BS -> a_1 .. a_L -> user
    struct CandidatePath
    {
        std::vector<NodeId> ris_sequence;
        NodeId user = 0;
        std::vector<double> hop_distances; // L + 1 entries [m]
        double kappa = 0.0;                // cascaded LoS amplitude gain
        double total_distance = 0.0;       // [m]
        double f_hat = 0.0;                // M^{2L} N_B kappa^2
        std::vector<Surface> hop_surfaces; // one per panel

        int num_ris() const { return static_cast<int>(ris_sequence.size()); }
        std::vector<NodeId> nodes() const; // BS, panels, user
        NodeId first_ris() const { return ris_sequence.front(); }
        NodeId terminal_ris() const { return ris_sequence.back(); }
        Surface terminal_surface() const { return hop_surfaces.back(); }
    };

    // Strict weak order used for every deterministic tie-break: user, then panel sequence
    bool path_less(const CandidatePath &a, const CandidatePath &b);
    bool same_route(const CandidatePath &a, const CandidatePath &b);

    struct PhaseProfile
    {
        NodeId node = 0;
        Surface surface = Surface::Reflect;
        std::vector<double> phases; // [rad], reduced to [0, 2 pi)
        double extra_rotation = 0.0;// coherence rotation applied on top of every element [rad]
    };

    struct Beamformer
    {
        NodeId first_ris = 0;
        CVec weights; // unit norm
    };

    Surface surface_for_hop(const Scene &scene, NodeId prev, NodeId node, NodeId next);

    ArrayResponse bs_steering(const Scene &scene, const SystemConfig &cfg, NodeId first_ris);

    ArrayResponse ris_response(const Scene &scene, const SystemConfig &cfg, NodeId panel, NodeId toward, ResponseRole role);

    // In-plane unit axes (u, w) of a panel. For panels parallel to the x-z plane they are the x and z axes.
    std::pair<Vec3, Vec3> panel_axes(const Vec3 &normal);

    double max_path_gain(double kappa, int num_ris, int num_elements, int n_bs_antennas);

    CandidatePath path_metrics(const Scene &scene, const SystemConfig &cfg, std::vector<NodeId> ris_sequence, NodeId user);

    PhaseProfile optimal_phase_profile(const Scene &scene, const SystemConfig &cfg, NodeId prev, NodeId node, NodeId next);

    Beamformer optimal_beamformer(const Scene &scene, const SystemConfig &cfg, NodeId first_ris);

    double wrap_phase(double radians); // into [0, 2 pi)
}

#endif
