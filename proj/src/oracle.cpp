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

#include "starbeam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace starbeam
{
    namespace
    {
        constexpr double kTwoPi = 2.0 * std::numbers::pi;

        const PhaseProfile &profile_for(const DesignSet &designs, NodeId node, Surface s)
        {
            const auto it = designs.phases.find({node, s});
            if (it == designs.phases.end())
                throw OracleError("no phase profile for surface " + std::string(to_string(s)) + " of panel " + std::to_string(node));
            return it->second;
        }

        double amplitude_for(const DesignSet &designs, NodeId node, Surface s)
        {
            const auto it = designs.amplitudes.find(node);
            if (it == designs.amplitudes.end())
                throw OracleError("no amplitude for panel " + std::to_string(node));
            return it->second[s];
        }

        const Beamformer &beamformer_for(const DesignSet &designs, NodeId first_ris)
        {
            const auto it = designs.beamformers.find(first_ris);
            if (it == designs.beamformers.end())
                throw OracleError("no beamformer towards panel " + std::to_string(first_ris));
            return it->second;
        }

        std::size_t user_slot(const DesignSet &designs, NodeId user)
        {
            const auto &users = designs.power.users;
            const auto it = std::find(users.begin(), users.end(), user);
            if (it == users.end())
                throw OracleError("no power fraction for user " + std::to_string(user));
            return static_cast<std::size_t>(it - users.begin());
        }

        // Beam index of every path of the forest
        std::vector<std::size_t> beam_of_paths(const BeamForest &forest)
        {
            std::vector<std::size_t> out(forest.paths.size(), 0);
            for (std::size_t q = 0; q < forest.beams.size(); ++q)
                for (auto p : forest.beams[q].members)
                    out[p] = q;
            return out;
        }

        bool reflect_only_route(const Scene &scene, const CandidatePath &path)
        {
            const auto nodes = path.nodes();
            for (std::size_t l = 0; l < path.ris_sequence.size(); ++l)
                if (path.hop_surfaces[l] != Surface::Reflect || !(side_cosine(scene, nodes[l], nodes[l + 1]) < 0.0))
                    return false;
            return true;
        }

        bool shares_panel(const CandidatePath &a, const CandidatePath &b)
        {
            std::set<NodeId> seen(a.ris_sequence.begin(), a.ris_sequence.end());
            return std::any_of(b.ris_sequence.begin(), b.ris_sequence.end(), [&](NodeId j) { return seen.count(j) > 0; });
        }
    }

    std::complex<double> hop_coefficient(const SystemConfig &cfg, double distance)
    {
        return std::sqrt(cfg.gamma()) / distance * std::polar(1.0, -kTwoPi * distance / cfg.wavelength());
    }

    CMat bs_ris_channel(const Scene &scene, const SystemConfig &cfg, NodeId panel)
    {
        const auto arrival = ris_response(scene, cfg, panel, kBsNode, ResponseRole::Arrival);
        const auto steering = bs_steering(scene, cfg, panel);
        return hop_coefficient(cfg, distance(scene, kBsNode, panel)) * arrival.entries * steering.entries.adjoint();
    }

    CMat ris_ris_channel(const Scene &scene, const SystemConfig &cfg, NodeId from, NodeId to)
    {
        const auto arrival = ris_response(scene, cfg, to, from, ResponseRole::Arrival);
        const auto departure = ris_response(scene, cfg, from, to, ResponseRole::Departure);
        return hop_coefficient(cfg, distance(scene, from, to)) * arrival.entries * departure.entries.adjoint();
    }

    CMat ris_user_channel(const Scene &scene, const SystemConfig &cfg, NodeId panel, NodeId user)
    {
        if (!scene.is_user(user))
            throw OracleError("node " + std::to_string(user) + " is not a user");
        const auto departure = ris_response(scene, cfg, panel, user, ResponseRole::Departure);
        return hop_coefficient(cfg, distance(scene, panel, user)) * departure.entries.adjoint();
    }

    double singular_value_ratio(const CMat &m)
    {
        if (m.rows() < 2 || m.cols() < 2)
            return 0.0;
        const Eigen::BDCSVD<CMat> svd(m);
        const auto &s = svd.singularValues();
        return s(0) > 0.0 ? s(1) / s(0) : 0.0;
    }

    CVec surface_coefficients(const PhaseProfile &profile, double beta)
    {
        const double scale = std::sqrt(beta);
        CVec out(static_cast<Eigen::Index>(profile.phases.size()));
        for (std::size_t m = 0; m < profile.phases.size(); ++m)
            out[static_cast<Eigen::Index>(m)] = std::polar(scale, profile.phases[m] + profile.extra_rotation);
        return out;
    }

    std::complex<double> simulate_path(const Scene &scene, const SystemConfig &cfg, const CandidatePath &path,
                                       const DesignSet &designs, const CVec &bs_weights)
    {
        if (bs_weights.size() != cfg.n_bs_antennas)
            throw OracleError("beamformer length does not match the BS array");
        const auto &seq = path.ris_sequence;

        CVec signal = bs_ris_channel(scene, cfg, seq.front()) * bs_weights;
        for (std::size_t l = 0; l < seq.size(); ++l)
        {
            const Surface s = path.hop_surfaces[l];
            const CVec theta = surface_coefficients(profile_for(designs, seq[l], s), amplitude_for(designs, seq[l], s));
            signal = theta.cwiseProduct(signal).eval();
            if (l + 1 < seq.size())
                signal = ris_ris_channel(scene, cfg, seq[l], seq[l + 1]) * signal;
        }
        const CMat g = ris_user_channel(scene, cfg, seq.back(), path.user);
        return (g * signal)(0, 0);
    }

    std::string_view to_string(OracleMode mode) { return mode == OracleMode::Isolated ? "isolated" : "composite"; }

    double relative_error(double predicted, double simulated)
    {
        return std::abs(predicted - simulated) / std::max(predicted, std::numeric_limits<double>::min());
    }

    OracleReport simulate_received_power(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest,
                                         const DesignSet &designs, OracleMode mode)
    {
        const auto beam_of = beam_of_paths(forest);
        const auto &fractions = designs.power.beam_fractions;
        if (fractions.size() != forest.beams.size())
            throw OracleError("beam power fractions do not match the forest");

        auto beam_scale = [&](std::size_t q)
        {
            const auto k = user_slot(designs, forest.beams[q].user);
            return std::sqrt(designs.power.user_fractions[k] * fractions[q]);
        };

        CVec composite = CVec::Zero(cfg.n_bs_antennas);
        if (mode == OracleMode::Composite)
            for (std::size_t q = 0; q < forest.beams.size(); ++q)
                composite += beam_scale(q) * beamformer_for(designs, forest.beams[q].first_ris).weights;

        OracleReport report;
        report.mode = mode;
        report.users = forest.users;
        for (NodeId user : forest.users)
        {
            std::complex<double> total = 0.0;
            for (std::size_t p = 0; p < forest.paths.size(); ++p)
            {
                const auto &path = forest.paths[p];
                if (path.user != user)
                    continue;
                const auto q = beam_of[p];
                if (mode == OracleMode::Isolated)
                    total += beam_scale(q) * simulate_path(scene, cfg, path, designs, beamformer_for(designs, path.first_ris()).weights);
                else
                    total += simulate_path(scene, cfg, path, designs, composite);
            }
            report.user_simulated.push_back(std::norm(total));
            report.user_predicted.push_back(designs.predicted_power.at(user_slot(designs, user)));
        }

        report.predicted = *std::min_element(report.user_predicted.begin(), report.user_predicted.end());
        report.simulated = *std::min_element(report.user_simulated.begin(), report.user_simulated.end());
        double leakage = 0.0;
        for (std::size_t k = 0; k < report.users.size(); ++k)
        {
            report.relative_error = std::max(report.relative_error, relative_error(report.user_predicted[k], report.user_simulated[k]));
            leakage = std::max(leakage, std::abs(report.user_simulated[k] - report.user_predicted[k]));
        }
        if (mode == OracleMode::Composite)
            report.leakage_power = leakage;
        return report;
    }

    OracleReport simulate_received_power(const Scene &scene, const SystemConfig &cfg, const Solution &solution, OracleMode mode)
    {
        return simulate_received_power(scene, cfg, solution.forest, solution.designs, mode);
    }

    std::optional<BruteForceResult> brute_force_select(const Scene &scene, const SystemConfig &cfg,
                                                       const std::vector<std::vector<CandidatePath>> &candidates, SolverMode mode)
    {
        (void)cfg;
        std::vector<NodeId> users;
        std::vector<CandidatePath> pool;
        for (const auto &per_user : candidates)
        {
            std::optional<NodeId> user;
            for (const auto &path : per_user)
            {
                if (mode == SolverMode::ReflectOnly && !reflect_only_route(scene, path))
                    continue;
                user = path.user;
                pool.push_back(path);
            }
            if (!user)
                return std::nullopt;
            users.push_back(*user);
        }
        std::sort(users.begin(), users.end());
        users.erase(std::unique(users.begin(), users.end()), users.end());
        if (pool.size() > kBruteForceLimit)
            throw OracleError("brute force limited to " + std::to_string(kBruteForceLimit) + " candidates, got " + std::to_string(pool.size()));

        std::optional<BruteForceResult> best;
        std::size_t feasible = 0;
        std::vector<CandidatePath> chosen;

        auto feasible_with = [&](const CandidatePath &extra)
        {
            if (mode != SolverMode::StarEs)
                for (const auto &p : chosen)
                    if (shares_panel(p, extra))
                        return false;
            chosen.push_back(extra);
            const bool ok = !find_forest_violation(scene, chosen).has_value();
            chosen.pop_back();
            return ok;
        };

        auto search = [&](auto &&self, std::size_t i) -> void
        {
            if (i == pool.size())
            {
                if (chosen.empty())
                    return;
                for (NodeId u : users)
                    if (std::none_of(chosen.begin(), chosen.end(), [&](const CandidatePath &p) { return p.user == u; }))
                        return;
                ++feasible;
                const double obj = selection_objective(chosen, users);
                if (!best || preferred_selection(obj, chosen, best->objective, best->paths))
                {
                    auto sorted = chosen;
                    std::sort(sorted.begin(), sorted.end(), path_less);
                    best = BruteForceResult{std::move(sorted), obj, 0};
                }
                return;
            }
            if (feasible_with(pool[i]))
            {
                chosen.push_back(pool[i]);
                self(self, i + 1);
                chosen.pop_back();
            }
            self(self, i + 1);
        };
        search(search, 0);

        if (best)
            best->feasible_subsets = feasible;
        return best;
    }

    Proposition1Report verify_proposition1(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest,
                                           std::uint64_t seed, int draws, double beta_fault)
    {
        Proposition1Report out;
        DesignSet designs = compute_designs(scene, cfg, forest);
        const auto bound = designs.predicted_power;

        DesignSet tested = designs;
        for (auto &[j, beta] : tested.amplitudes)
        {
            beta.reflect *= 1.0 - beta_fault;
            beta.transmit *= 1.0 - beta_fault;
        }
        out.equality = simulate_received_power(scene, cfg, forest, tested, OracleMode::Isolated);
        out.equality_ok = out.equality.relative_error < kEqualityTolerance;

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto random_simplex = [&](std::size_t n)
        {
            std::vector<double> v(n);
            double total = 0.0;
            for (auto &x : v)
            {
                x = -std::log1p(-unit(rng)); // exponential draws give a uniform simplex point
                total += x;
            }
            for (auto &x : v)
                x /= total;
            return v;
        };

        out.dominance_ok = true;
        for (int d = 0; d < draws; ++d)
        {
            DesignSet trial = designs;
            for (auto &[j, beta] : trial.amplitudes)
            {
                const auto &fn = forest.nodes.at(j);
                const double r = unit(rng);
                if (fn.uses(Surface::Reflect) && fn.uses(Surface::Transmit))
                {
                    beta.reflect = r;
                    beta.transmit = 1.0 - r;
                }
                else if (fn.uses(Surface::Reflect))
                    beta.reflect = r;
                else
                    beta.transmit = r;
            }
            trial.power.user_fractions = random_simplex(forest.users.size());
            for (NodeId user : forest.users)
            {
                const auto qs = forest.beams_of(user);
                const auto split = random_simplex(qs.size());
                for (std::size_t i = 0; i < qs.size(); ++i)
                    trial.power.beam_fractions[qs[i]] = split[i];
            }
            const auto report = simulate_received_power(scene, cfg, forest, trial, OracleMode::Isolated);
            const double ratio = report.simulated / bound.front();
            out.worst_draw_ratio = std::max(out.worst_draw_ratio, ratio);
            if (ratio > 1.0 + kDominanceTolerance)
                out.dominance_ok = false;
            ++out.draws;
        }
        return out;
    }
}
