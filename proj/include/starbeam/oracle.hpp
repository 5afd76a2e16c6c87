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

#ifndef STARBEAM_ORACLE_HPP
#define STARBEAM_ORACLE_HPP

#include "starbeam/selection.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace starbeam
{
    using CMat = Eigen::MatrixXcd;

    class OracleError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Complex hop coefficient sqrt(gamma) / d * exp(-i 2 pi d / lambda)
    std::complex<double> hop_coefficient(const SystemConfig &cfg, double distance);

    CMat bs_ris_channel(const Scene &scene, const SystemConfig &cfg, NodeId panel);              // M x N_B
    CMat ris_ris_channel(const Scene &scene, const SystemConfig &cfg, NodeId from, NodeId to);   // M x M
    CMat ris_user_channel(const Scene &scene, const SystemConfig &cfg, NodeId panel, NodeId user); // 1 x M

    // sigma_2 / sigma_1; zero for a rank-one matrix
    double singular_value_ratio(const CMat &m);

    // Diagonal of sqrt(beta) * diag(exp(i (theta + rotation))) for one surface
    CVec surface_coefficients(const PhaseProfile &profile, double beta);

    // g^H Theta_L S ... Theta_1 H w along one path with the given designs
    std::complex<double> simulate_path(const Scene &scene, const SystemConfig &cfg, const CandidatePath &path,
                                       const DesignSet &designs, const CVec &bs_weights);

    enum class OracleMode
    {
        Isolated,
        Composite
    };

    std::string_view to_string(OracleMode mode);

    struct OracleReport
    {
        OracleMode mode = OracleMode::Isolated;
        double predicted = 0.0;       // closed form P~
        double simulated = 0.0;       // weakest user's simulated power
        double relative_error = 0.0;  // worst over users
        std::optional<double> leakage_power;
        std::vector<NodeId> users;
        std::vector<double> user_predicted;
        std::vector<double> user_simulated;
    };

    double relative_error(double predicted, double simulated);

    OracleReport simulate_received_power(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest,
                                         const DesignSet &designs, OracleMode mode);
    OracleReport simulate_received_power(const Scene &scene, const SystemConfig &cfg, const Solution &solution, OracleMode mode);

    struct BruteForceResult
    {
        std::vector<CandidatePath> paths; // canonical order
        double objective = 0.0;
        std::size_t feasible_subsets = 0;
    };

    inline constexpr std::size_t kBruteForceLimit = 20;

    // Exhaustive subset search; nullopt when no feasible subset serves every user of `candidates`
    std::optional<BruteForceResult> brute_force_select(const Scene &scene, const SystemConfig &cfg,
                                                       const std::vector<std::vector<CandidatePath>> &candidates, SolverMode mode);

    struct Proposition1Report
    {
        OracleReport equality;
        double worst_draw_ratio = 0.0; // max over draws of simulated / P~
        int draws = 0;
        bool equality_ok = false;
        bool dominance_ok = false;
    };

    inline constexpr double kEqualityTolerance = 1e-9;
    inline constexpr double kDominanceTolerance = 1e-9;

    // beta_fault scales every amplitude by (1 - beta_fault); nonzero values exist only to exercise the failure path
    Proposition1Report verify_proposition1(const Scene &scene, const SystemConfig &cfg, const BeamForest &forest,
                                           std::uint64_t seed, int draws = 100, double beta_fault = 0.0);
}

#endif
