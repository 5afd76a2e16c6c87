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

#include "starbeam/channel.hpp"

#include <cmath>
#include <numbers>

namespace starbeam
{
    namespace
    {
        constexpr double kTwoPi = 2.0 * std::numbers::pi;

        void require_los(const Scene &scene, NodeId a, NodeId b)
        {
            if (!scene.has_los(a, b))
                throw PathError("no LoS link between node " + std::to_string(a) + " and node " + std::to_string(b));
        }

        void require_not_grazing(const Scene &scene, NodeId other, NodeId panel)
        {
            if (is_grazing(scene, other, panel))
                throw PathError("node " + std::to_string(other) + " is at grazing incidence on panel " + std::to_string(panel));
        }

        // A hop i -> j is routable if it is a LoS pair directed outwards from the BS
        void require_outward_hop(const Scene &scene, NodeId from, NodeId to)
        {
            require_los(scene, from, to);
            if (scene.is_user(to))
                return;
            const double d_from = from == kBsNode ? 0.0 : distance(scene, kBsNode, from);
            if (!(distance(scene, kBsNode, to) > d_from))
                throw PathError("hop " + std::to_string(from) + " -> " + std::to_string(to) + " does not move away from the BS");
        }
    }

    std::string_view to_string(Surface s) { return s == Surface::Reflect ? "R" : "T"; }

    std::vector<NodeId> CandidatePath::nodes() const
    {
        std::vector<NodeId> out;
        out.reserve(ris_sequence.size() + 2);
        out.push_back(kBsNode);
        out.insert(out.end(), ris_sequence.begin(), ris_sequence.end());
        out.push_back(user);
        return out;
    }

    bool path_less(const CandidatePath &a, const CandidatePath &b)
    {
        if (a.user != b.user)
            return a.user < b.user;
        return a.ris_sequence < b.ris_sequence;
    }

    bool same_route(const CandidatePath &a, const CandidatePath &b)
    {
        return a.user == b.user && a.ris_sequence == b.ris_sequence;
    }

    double wrap_phase(double radians)
    {
        double r = std::fmod(radians, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        if (r >= kTwoPi)
            r = 0.0;
        return r;
    }

    Surface surface_for_hop(const Scene &scene, NodeId prev, NodeId node, NodeId next)
    {
        require_not_grazing(scene, prev, node);
        require_not_grazing(scene, next, node);
        const double product = side_cosine(scene, prev, node) * side_cosine(scene, next, node);
        return product > 0.0 ? Surface::Reflect : Surface::Transmit;
    }

    ArrayResponse bs_steering(const Scene &scene, const SystemConfig &cfg, NodeId first_ris)
    {
        require_los(scene, kBsNode, first_ris);
        const double cos_aod = direction(scene, kBsNode, first_ris).dot(scene.bs_array_axis());
        const double step = kTwoPi * cfg.bs_spacing() * cos_aod / cfg.wavelength();

        ArrayResponse out{kBsNode, CVec(cfg.n_bs_antennas)};
        for (int n = 0; n < cfg.n_bs_antennas; ++n)
            out.entries[n] = std::polar(1.0, -step * n);
        return out;
    }

    std::pair<Vec3, Vec3> panel_axes(const Vec3 &normal)
    {
        // u: global x projected into the panel plane (y if x is the normal), w completes the in-plane basis
        Vec3 u = Vec3::UnitX() - normal.dot(Vec3::UnitX()) * normal;
        if (u.norm() < 1e-9)
            u = Vec3::UnitY() - normal.dot(Vec3::UnitY()) * normal;
        u.normalize();
        Vec3 w = Vec3::UnitZ() - normal.dot(Vec3::UnitZ()) * normal - u.dot(Vec3::UnitZ()) * u;
        if (w.norm() < 1e-9)
            w = normal.cross(u);
        w.normalize();
        return {u, w};
    }

    ArrayResponse ris_response(const Scene &scene, const SystemConfig &cfg, NodeId panel, NodeId toward, ResponseRole role)
    {
        require_los(scene, panel, toward);
        require_not_grazing(scene, toward, panel);

        const Vec3 dir = role == ResponseRole::Arrival ? direction(scene, toward, panel) : direction(scene, panel, toward);
        const auto [u_axis, w_axis] = panel_axes(*scene.node(panel).normal);
        const double u = dir.dot(u_axis);
        const double w = dir.dot(w_axis);
        const double scale = kTwoPi * cfg.ris_spacing() / cfg.wavelength();

        const int m0 = cfg.m0;
        ArrayResponse out{panel, CVec(cfg.num_elements())};
        for (int m = 0; m < m0 * m0; ++m)
        {
            const int row = m / m0;
            const int col = m % m0;
            out.entries[m] = std::polar(1.0, -scale * (row * u + col * w));
        }
        return out;
    }

    double max_path_gain(double kappa, int num_ris, int num_elements, int n_bs_antennas)
    {
        const double array_gain = std::pow(static_cast<double>(num_elements), 2 * num_ris);
        return array_gain * n_bs_antennas * kappa * kappa;
    }

    CandidatePath path_metrics(const Scene &scene, const SystemConfig &cfg, std::vector<NodeId> ris_sequence, NodeId user)
    {
        if (ris_sequence.empty())
            throw PathError("a path needs at least one STAR-RIS");
        if (!scene.is_user(user))
            throw PathError("node " + std::to_string(user) + " is not a user");
        for (NodeId j : ris_sequence)
            if (!scene.is_ris(j))
                throw PathError("node " + std::to_string(j) + " is not a STAR-RIS");

        CandidatePath path;
        path.ris_sequence = std::move(ris_sequence);
        path.user = user;

        const auto nodes = path.nodes();
        const double sqrt_gamma = std::sqrt(cfg.gamma());
        double kappa = 1.0;
        for (std::size_t l = 0; l + 1 < nodes.size(); ++l)
        {
            require_outward_hop(scene, nodes[l], nodes[l + 1]);
            const double d = distance(scene, nodes[l], nodes[l + 1]);
            path.hop_distances.push_back(d);
            path.total_distance += d;
            kappa *= sqrt_gamma / d;
        }
        for (std::size_t l = 1; l + 1 < nodes.size(); ++l)
            path.hop_surfaces.push_back(surface_for_hop(scene, nodes[l - 1], nodes[l], nodes[l + 1]));

        path.kappa = kappa;
        path.f_hat = max_path_gain(kappa, path.num_ris(), cfg.num_elements(), cfg.n_bs_antennas);
        return path;
    }

    PhaseProfile optimal_phase_profile(const Scene &scene, const SystemConfig &cfg, NodeId prev, NodeId node, NodeId next)
    {
        const Surface surface = surface_for_hop(scene, prev, node, next);
        const auto arrival = ris_response(scene, cfg, node, prev, ResponseRole::Arrival);
        const auto departure = ris_response(scene, cfg, node, next, ResponseRole::Departure);

        PhaseProfile out{node, surface, std::vector<double>(static_cast<std::size_t>(cfg.num_elements())), 0.0};
        for (int m = 0; m < cfg.num_elements(); ++m)
            out.phases[static_cast<std::size_t>(m)] = wrap_phase(std::arg(departure.entries[m]) - std::arg(arrival.entries[m]));
        return out;
    }

    Beamformer optimal_beamformer(const Scene &scene, const SystemConfig &cfg, NodeId first_ris)
    {
        const auto steering = bs_steering(scene, cfg, first_ris);
        return {first_ris, steering.entries / steering.entries.norm()};
    }
}
