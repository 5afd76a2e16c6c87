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

#include "starbeam/scene.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace starbeam
{
    namespace
    {
        using json = nlohmann::json;
        using ordered_json = nlohmann::ordered_json;

        std::string node_label(NodeId id) { return "node " + std::to_string(id); }

        Vec3 read_vec3(const json &value, const std::string &where)
        {
            if (!value.is_array() || value.size() != 3)
                throw SceneError(where + ": expected an array of 3 numbers");
            Vec3 out;
            for (int c = 0; c < 3; ++c)
            {
                if (!value[c].is_number())
                    throw SceneError(where + ": expected an array of 3 numbers");
                out[c] = value[c].get<double>();
                if (!std::isfinite(out[c]))
                    throw SceneError(where + ": non-finite coordinate");
            }
            return out;
        }

        json parse_document(std::string_view text)
        {
            try
            {
                return json::parse(text.begin(), text.end());
            }
            catch (const json::parse_error &e)
            {
                // Translate the byte offset into a line number for the diagnostic
                const auto offset = std::min<std::size_t>(e.byte, text.size());
                const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
                throw SceneError("parse error at line " + std::to_string(line) + ": " + e.what());
            }
        }

        template <typename T>
        T read_number(const json &doc, const char *key)
        {
            const auto &value = doc.at(key);
            if (!value.is_number())
                throw SceneError(std::string("config field '") + key + "' must be a number");
            if constexpr (std::is_integral_v<T>)
            {
                if (!value.is_number_integer())
                    throw SceneError(std::string("config field '") + key + "' must be an integer");
            }
            return value.get<T>();
        }

        ordered_json vec_json(const Vec3 &v) { return ordered_json::array({v.x(), v.y(), v.z()}); }
    }

    Scene::Scene(std::vector<Node> nodes, std::vector<NodePair> los_pairs, Vec3 bs_array_axis)
        : nodes_(std::move(nodes)), bs_array_axis_(std::move(bs_array_axis))
    {
        std::sort(nodes_.begin(), nodes_.end(), [](const Node &a, const Node &b) { return a.id < b.id; });

        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].id != static_cast<NodeId>(i))
                throw SceneError("node ids must be contiguous from 0; missing or duplicate id near " + node_label(static_cast<NodeId>(i)));

        if (nodes_.empty())
            throw SceneError("scene has no nodes");
        if (nodes_.front().kind != NodeKind::Bs)
            throw SceneError("node 0 must be the BS");

        // Kinds must appear as BS, panels, users in id order
        std::size_t pos = 1;
        while (pos < nodes_.size() && nodes_[pos].kind == NodeKind::StarRis)
            ++pos;
        num_ris_ = static_cast<int>(pos) - 1;
        while (pos < nodes_.size() && nodes_[pos].kind == NodeKind::User)
            ++pos;
        num_users_ = static_cast<int>(pos) - 1 - num_ris_;
        if (pos != nodes_.size())
            throw SceneError(node_label(nodes_[pos].id) + ": ids must list the BS, then all STAR-RIS panels, then all users");
        if (num_ris_ < 1)
            throw SceneError("scene needs at least one STAR-RIS");
        if (num_users_ < 1)
            throw SceneError("scene needs at least one user");

        const double axis_norm = bs_array_axis_.norm();
        if (!(axis_norm > 0.0) || !std::isfinite(axis_norm))
            throw SceneError("BS array axis must be a nonzero vector");
        bs_array_axis_ /= axis_norm;

        for (const auto &n : nodes_)
        {
            if (n.kind == NodeKind::StarRis)
            {
                if (!n.normal)
                    throw SceneError(node_label(n.id) + ": STAR-RIS requires a normal");
                if (std::abs(n.normal->norm() - 1.0) > kUnitNormalTolerance)
                    throw SceneError(node_label(n.id) + ": normal not unit");
            }
            else if (n.normal)
                throw SceneError(node_label(n.id) + ": only STAR-RIS nodes carry a normal");
        }

        for (std::size_t i = 0; i < nodes_.size(); ++i)
            for (std::size_t j = i + 1; j < nodes_.size(); ++j)
                if (nodes_[i].position == nodes_[j].position)
                    throw SceneError(node_label(nodes_[i].id) + " and " + node_label(nodes_[j].id) + " are coincident");

        for (NodeId j = 1; j <= num_ris_; ++j)
            if (side_cosine(*this, kBsNode, j) > 0.0)
                throw SceneError(node_label(j) + ": normal points away from the BS");

        for (auto [a, b] : los_pairs)
        {
            if (a < 0 || b < 0 || a >= num_nodes() || b >= num_nodes())
                throw SceneError("LoS pair [" + std::to_string(a) + ", " + std::to_string(b) + "] references a missing node");
            if (a == b)
                throw SceneError("LoS pair [" + std::to_string(a) + ", " + std::to_string(b) + "] is a self pair");
            los_pairs_.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(los_pairs_.begin(), los_pairs_.end());
        los_pairs_.erase(std::unique(los_pairs_.begin(), los_pairs_.end()), los_pairs_.end());
    }

    const Node &Scene::node(NodeId id) const
    {
        if (id < 0 || id >= num_nodes())
            throw SceneError("unknown " + node_label(id));
        return nodes_[static_cast<std::size_t>(id)];
    }

    NodeId Scene::user_node(int k) const
    {
        if (k < 1 || k > num_users_)
            throw SceneError("user index " + std::to_string(k) + " out of range");
        return num_ris_ + k;
    }

    std::vector<NodeId> Scene::user_nodes() const
    {
        std::vector<NodeId> out;
        for (int k = 1; k <= num_users_; ++k)
            out.push_back(num_ris_ + k);
        return out;
    }

    bool Scene::has_los(NodeId i, NodeId j) const
    {
        const NodePair key{std::min(i, j), std::max(i, j)};
        return std::binary_search(los_pairs_.begin(), los_pairs_.end(), key);
    }

    Scene Scene::with_users(int k) const
    {
        if (k < 1 || k > num_users_)
            throw SceneError("cannot keep " + std::to_string(k) + " users out of " + std::to_string(num_users_));
        const NodeId last = num_ris_ + k;
        std::vector<Node> kept(nodes_.begin(), nodes_.begin() + last + 1);
        std::vector<NodePair> pairs;
        for (auto [a, b] : los_pairs_)
            if (a <= last && b <= last)
                pairs.emplace_back(a, b);
        return Scene(std::move(kept), std::move(pairs), bs_array_axis_);
    }

    Scene Scene::transformed(const Eigen::Matrix3d &rotation, const Vec3 &translation) const
    {
        std::vector<Node> moved = nodes_;
        for (auto &n : moved)
        {
            n.position = rotation * n.position + translation;
            if (n.normal)
                n.normal = (rotation * *n.normal).normalized();
        }
        return Scene(std::move(moved), los_pairs_, rotation * bs_array_axis_);
    }

    std::string_view to_string(SolverMode mode)
    {
        switch (mode)
        {
        case SolverMode::StarEs:
            return "star_es";
        case SolverMode::StarMs:
            return "star_ms";
        case SolverMode::ReflectOnly:
            return "reflect_only";
        }
        return "unknown";
    }

    SolverMode parse_solver_mode(std::string_view text)
    {
        if (text == "star_es")
            return SolverMode::StarEs;
        if (text == "star_ms")
            return SolverMode::StarMs;
        if (text == "reflect_only")
            return SolverMode::ReflectOnly;
        throw SceneError("unknown solver mode '" + std::string(text) + "' (expected star_es, star_ms or reflect_only)");
    }

    double SystemConfig::gamma() const
    {
        if (reference_gain)
            return *reference_gain;
        const double r = wavelength() / (4.0 * std::numbers::pi);
        return r * r;
    }

    double SystemConfig::bs_spacing() const { return bs_element_spacing.value_or(wavelength() / 2.0); }
    double SystemConfig::ris_spacing() const { return ris_element_spacing.value_or(wavelength() / 2.0); }

    void SystemConfig::validate() const
    {
        if (n_bs_antennas < 1)
            throw SceneError("n_bs_antennas must be >= 1");
        if (m0 < 1)
            throw SceneError("m0 must be >= 1");
        if (candidates_per_user < 1)
            throw SceneError("candidates_per_user must be >= 1");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw SceneError("carrier_hz must be positive");
        if (!(gamma() > 0.0))
            throw SceneError("reference_gain must be positive");
        if (!(bs_spacing() > 0.0) || !(ris_spacing() > 0.0))
            throw SceneError("element spacings must be positive");
    }

    double distance(const Scene &scene, NodeId i, NodeId j)
    {
        if (i == j)
            throw SceneError("distance of " + node_label(i) + " to itself is undefined");
        return (scene.node(i).position - scene.node(j).position).norm();
    }

    Vec3 direction(const Scene &scene, NodeId i, NodeId j)
    {
        if (i == j)
            throw SceneError("direction of " + node_label(i) + " to itself is undefined");
        const Vec3 delta = scene.node(j).position - scene.node(i).position;
        const double d = delta.norm();
        if (!(d > 0.0))
            throw SceneError(node_label(i) + " and " + node_label(j) + " are coincident");
        return delta / d;
    }

    double side_cosine(const Scene &scene, NodeId i, NodeId panel)
    {
        const Node &p = scene.node(panel);
        if (p.kind != NodeKind::StarRis)
            throw SceneError(node_label(panel) + " is not a STAR-RIS");
        return direction(scene, i, panel).dot(*p.normal);
    }

    bool on_front_side(const Scene &scene, NodeId i, NodeId panel) { return side_cosine(scene, i, panel) < 0.0; }

    bool is_grazing(const Scene &scene, NodeId i, NodeId panel)
    {
        return std::abs(side_cosine(scene, i, panel)) < kGrazingThreshold;
    }

    std::vector<GeometryDiagnostic> validate_geometry(const Scene &scene)
    {
        std::vector<GeometryDiagnostic> out;
        auto check = [&](NodeId other, NodeId panel)
        {
            if (!scene.is_ris(panel))
                return;
            const double b = side_cosine(scene, other, panel);
            if (std::abs(b) < kGrazingThreshold)
                out.push_back({other, panel, b,
                               node_label(other) + " is at grazing incidence on panel " + std::to_string(panel)});
        };
        for (auto [a, b] : scene.los_pairs())
        {
            check(a, b);
            check(b, a);
        }
        return out;
    }

    Scene load_scene(std::string_view text)
    {
        const json doc = parse_document(text);
        if (!doc.is_object())
            throw SceneError("scene document must be an object");
        if (!doc.contains("nodes") || !doc["nodes"].is_array())
            throw SceneError("scene document needs a 'nodes' array");
        if (!doc.contains("los_pairs") || !doc["los_pairs"].is_array())
            throw SceneError("scene document needs a 'los_pairs' array");

        std::vector<Node> nodes;
        std::size_t index = 0;
        for (const auto &entry : doc["nodes"])
        {
            const std::string where = "nodes[" + std::to_string(index++) + "]";
            if (!entry.is_object())
                throw SceneError(where + ": expected an object");
            if (!entry.contains("id") || !entry["id"].is_number_integer())
                throw SceneError(where + ".id: expected an integer");
            if (!entry.contains("kind") || !entry["kind"].is_string())
                throw SceneError(where + ".kind: expected a string");
            if (!entry.contains("position"))
                throw SceneError(where + ".position: missing");

            Node n;
            n.id = entry["id"].get<int>();
            const auto kind = entry["kind"].get<std::string>();
            if (kind == "bs")
                n.kind = NodeKind::Bs;
            else if (kind == "star_ris")
                n.kind = NodeKind::StarRis;
            else if (kind == "user")
                n.kind = NodeKind::User;
            else
                throw SceneError(where + ".kind: unknown kind '" + kind + "'");
            n.position = read_vec3(entry["position"], where + ".position");
            if (entry.contains("normal"))
                n.normal = read_vec3(entry["normal"], where + ".normal");
            nodes.push_back(std::move(n));
        }

        std::vector<NodePair> pairs;
        index = 0;
        for (const auto &entry : doc["los_pairs"])
        {
            const std::string where = "los_pairs[" + std::to_string(index++) + "]";
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() || !entry[1].is_number_integer())
                throw SceneError(where + ": expected [id, id]");
            pairs.emplace_back(entry[0].get<int>(), entry[1].get<int>());
        }

        Vec3 axis = Vec3::UnitX();
        if (doc.contains("bs_array_axis"))
            axis = read_vec3(doc["bs_array_axis"], "bs_array_axis");

        return Scene(std::move(nodes), std::move(pairs), axis);
    }

    Scene load_scene_file(const std::filesystem::path &path) { return load_scene(read_text_file(path)); }

    std::string dump_scene(const Scene &scene)
    {
        ordered_json doc;
        doc["bs_array_axis"] = vec_json(scene.bs_array_axis());
        doc["nodes"] = ordered_json::array();
        for (const auto &n : scene.nodes())
        {
            ordered_json e;
            e["id"] = n.id;
            e["kind"] = n.kind == NodeKind::Bs ? "bs" : n.kind == NodeKind::StarRis ? "star_ris" : "user";
            e["position"] = vec_json(n.position);
            if (n.normal)
                e["normal"] = vec_json(*n.normal);
            doc["nodes"].push_back(std::move(e));
        }
        doc["los_pairs"] = ordered_json::array();
        for (auto [a, b] : scene.los_pairs())
            doc["los_pairs"].push_back(ordered_json::array({a, b}));
        return doc.dump(2) + "\n";
    }

    SystemConfig load_config(std::string_view text)
    {
        const json doc = parse_document(text);
        if (!doc.is_object())
            throw SceneError("config document must be an object");
        for (const char *key : {"n_bs_antennas", "m0", "carrier_hz", "candidates_per_user", "mode"})
            if (!doc.contains(key))
                throw SceneError(std::string("config field '") + key + "' is missing");

        SystemConfig cfg;
        cfg.n_bs_antennas = read_number<int>(doc, "n_bs_antennas");
        cfg.m0 = read_number<int>(doc, "m0");
        cfg.carrier_hz = read_number<double>(doc, "carrier_hz");
        cfg.candidates_per_user = read_number<int>(doc, "candidates_per_user");
        if (!doc["mode"].is_string())
            throw SceneError("config field 'mode' must be a string");
        cfg.mode = parse_solver_mode(doc["mode"].get<std::string>());
        if (doc.contains("reference_gain"))
            cfg.reference_gain = read_number<double>(doc, "reference_gain");
        if (doc.contains("bs_element_spacing"))
            cfg.bs_element_spacing = read_number<double>(doc, "bs_element_spacing");
        if (doc.contains("ris_element_spacing"))
            cfg.ris_element_spacing = read_number<double>(doc, "ris_element_spacing");
        cfg.validate();
        return cfg;
    }

    SystemConfig load_config_file(const std::filesystem::path &path) { return load_config(read_text_file(path)); }

    std::string dump_config(const SystemConfig &config)
    {
        ordered_json doc;
        doc["n_bs_antennas"] = config.n_bs_antennas;
        doc["m0"] = config.m0;
        doc["carrier_hz"] = config.carrier_hz;
        doc["reference_gain"] = config.gamma();
        doc["bs_element_spacing"] = config.bs_spacing();
        doc["ris_element_spacing"] = config.ris_spacing();
        doc["candidates_per_user"] = config.candidates_per_user;
        doc["mode"] = std::string(to_string(config.mode));
        return doc.dump(2) + "\n";
    }

    std::string read_text_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw SceneError("cannot open " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}
