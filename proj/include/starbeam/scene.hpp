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

#ifndef STARBEAM_SCENE_HPP
#define STARBEAM_SCENE_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace starbeam
{
    // Node numbering follows the system model: 0 is the BS, 1..J the STAR-RIS panels, J+1..J+K the users.
    using NodeId = int;
    using Vec3 = Eigen::Vector3d;
    using NodePair = std::pair<NodeId, NodeId>;

    inline constexpr NodeId kBsNode = 0;
    inline constexpr double kSpeedOfLight = 299792458.0; // [m/s]
    inline constexpr double kGrazingThreshold = 1e-6;    // |b| below this is treated as grazing incidence
    inline constexpr double kUnitNormalTolerance = 1e-12;

    enum class NodeKind
    {
        Bs,
        StarRis,
        User
    };

    struct Node
    {
        NodeId id = 0;
        NodeKind kind = NodeKind::Bs;
        Vec3 position = Vec3::Zero();  // [m]
        std::optional<Vec3> normal{};  // unit vector, panels only
    };

    // Raised for malformed documents and violated scene invariants
    class SceneError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Immutable, validated scene. Construction checks every invariant and throws SceneError.
    class Scene
    {
    public:
        Scene(std::vector<Node> nodes, std::vector<NodePair> los_pairs, Vec3 bs_array_axis = Vec3::UnitX());

        int num_ris() const { return num_ris_; }
        int num_users() const { return num_users_; }
        int num_nodes() const { return static_cast<int>(nodes_.size()); }

        const std::vector<Node> &nodes() const { return nodes_; }
        const Node &node(NodeId id) const;
        NodeKind kind(NodeId id) const { return node(id).kind; }
        bool is_ris(NodeId id) const { return id >= 1 && id <= num_ris_; }
        bool is_user(NodeId id) const { return id > num_ris_ && id < num_nodes(); }

        NodeId user_node(int k) const; // k is 1-based
        std::vector<NodeId> user_nodes() const;

        // Normalized (min, max), sorted, without duplicates
        const std::vector<NodePair> &los_pairs() const { return los_pairs_; }
        bool has_los(NodeId i, NodeId j) const;

        const Vec3 &bs_array_axis() const { return bs_array_axis_; }

        // Copy restricted to the first k users (users 1..k keep their ids)
        Scene with_users(int k) const;

        // Rigid transform of positions; normals and the BS array axis are rotated along
        Scene transformed(const Eigen::Matrix3d &rotation, const Vec3 &translation) const;

    private:
        std::vector<Node> nodes_;
        std::vector<NodePair> los_pairs_;
        Vec3 bs_array_axis_;
        int num_ris_ = 0;
        int num_users_ = 0;
    };

    enum class SolverMode
    {
        StarEs,     // energy splitting, coupled paths allowed
        StarMs,     // mode selection, node-disjoint paths
        ReflectOnly // node-disjoint, front-side reflection only
    };

    std::string_view to_string(SolverMode mode);
    SolverMode parse_solver_mode(std::string_view text);

    // System parameters. Optional fields resolve to wavelength-based defaults.
    struct SystemConfig
    {
        int n_bs_antennas = 16;
        int m0 = 14;
        double carrier_hz = 5e9;
        std::optional<double> reference_gain{};     // defaults to (lambda / 4 pi)^2
        std::optional<double> bs_element_spacing{}; // defaults to lambda / 2
        std::optional<double> ris_element_spacing{};// defaults to lambda / 2
        int candidates_per_user = 12;
        SolverMode mode = SolverMode::StarEs;

        double wavelength() const { return kSpeedOfLight / carrier_hz; }
        int num_elements() const { return m0 * m0; }
        double gamma() const;
        double bs_spacing() const;
        double ris_spacing() const;

        // Throws SceneError on invalid values
        void validate() const;
    };

    double distance(const Scene &scene, NodeId i, NodeId j);

    // Unit vector from node i to node j
    Vec3 direction(const Scene &scene, NodeId i, NodeId j);

    // b_{i,j} = direction(i, j) . n_j for panel j. The normal points towards the BS half-space,
    // so nodes on the front side see b < 0 and nodes behind the panel see b > 0.
    double side_cosine(const Scene &scene, NodeId i, NodeId panel);

    // True if node i lies in the half-space the panel normal points into
    bool on_front_side(const Scene &scene, NodeId i, NodeId panel);

    bool is_grazing(const Scene &scene, NodeId i, NodeId panel);

    struct GeometryDiagnostic
    {
        NodeId node = 0;
        NodeId panel = 0;
        double cosine = 0.0;
        std::string message;
    };

    // Flags every LoS pair touching a panel at grazing incidence
    std::vector<GeometryDiagnostic> validate_geometry(const Scene &scene);

    Scene load_scene(std::string_view text);
    Scene load_scene_file(const std::filesystem::path &path);
    std::string dump_scene(const Scene &scene); // canonical form, load/dump is idempotent

    SystemConfig load_config(std::string_view text);
    SystemConfig load_config_file(const std::filesystem::path &path);
    std::string dump_config(const SystemConfig &config); // defaults materialized

    std::string read_text_file(const std::filesystem::path &path);
}

#endif
