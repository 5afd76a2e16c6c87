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

#ifndef STARBEAM_TESTS_FIXTURES_HPP
#define STARBEAM_TESTS_FIXTURES_HPP

#include "starbeam/oracle.hpp"

#include <filesystem>
#include <random>

namespace starbeam::testing
{
    struct RandomSceneSpec
    {
        int num_ris = 4;
        int num_users = 1;
        double los_probability = 0.6;
        double corridor_length = 14.0; // [m]
    };

    // Panels on two corridor walls facing the BS (normals +-y), users scattered down the corridor
    Scene random_scene(std::mt19937_64 &rng, const RandomSceneSpec &spec);

    // Redraws until every user has at least one candidate under StarEs
    Scene random_feasible_scene(std::mt19937_64 &rng, const RandomSceneSpec &spec, const SystemConfig &cfg);

    SystemConfig random_config(std::mt19937_64 &rng, int max_m0, int max_nb, int max_s);

    // Random DAG over 0..n+1 with 0 the source and n+1 the sink; integer weights produce ties
    LosGraph random_dag(std::mt19937_64 &rng, int num_inner, double edge_probability, bool integer_weights);

    // Two beams, BS -> {1,2,3}, {1,2}, {1,4} and {5,6} -> user 7; node 1 transmits to 2 and reflects to 4,
    // node 2 transmits to 3 and reflects to the user
    Scene two_beam_scene();

    std::filesystem::path data_dir();
}

#endif
