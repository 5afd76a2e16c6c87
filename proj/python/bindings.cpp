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

#include "starbeam/cli.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace starbeam;

namespace
{
    py::dict path_dict(const CandidatePath &p)
    {
        py::dict d;
        d["user"] = p.user;
        d["ris_sequence"] = p.ris_sequence;
        std::vector<std::string> surfaces;
        for (auto s : p.hop_surfaces)
            surfaces.emplace_back(to_string(s));
        d["surfaces"] = surfaces;
        d["hop_distances"] = p.hop_distances;
        d["kappa"] = p.kappa;
        d["f_hat"] = p.f_hat;
        return d;
    }

    std::string solve_report(const Scene &scene, const SystemConfig &cfg)
    {
        const auto solution = cli::solve(scene, cfg);
        const auto isolated = simulate_received_power(scene, cfg, solution, OracleMode::Isolated);
        const auto composite = simulate_received_power(scene, cfg, solution, OracleMode::Composite);
        return cli::solution_report(scene, cfg, solution, isolated, composite, {solution.stats.wall_ms, 0.0});
    }
}

PYBIND11_MODULE(_starbeam, m)
{
    m.doc() = "multi-path beam routing over cascaded STAR-RIS links";

    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<SceneError>(m, "SceneError", PyExc_ValueError);
    py::register_exception<PathError>(m, "PathError", PyExc_ValueError);
    py::register_exception<OracleError>(m, "OracleError", PyExc_RuntimeError);

    py::class_<Scene>(m, "Scene")
        .def_property_readonly("num_ris", &Scene::num_ris)
        .def_property_readonly("num_users", &Scene::num_users)
        .def_property_readonly("num_nodes", &Scene::num_nodes)
        .def_property_readonly("user_nodes", &Scene::user_nodes)
        .def_property_readonly("los_pairs", &Scene::los_pairs)
        .def("with_users", &Scene::with_users, py::arg("k"))
        .def("dump", [](const Scene &s) { return dump_scene(s); });

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("n_bs_antennas", &SystemConfig::n_bs_antennas)
        .def_readwrite("m0", &SystemConfig::m0)
        .def_readwrite("carrier_hz", &SystemConfig::carrier_hz)
        .def_readwrite("candidates_per_user", &SystemConfig::candidates_per_user)
        .def_property(
            "mode", [](const SystemConfig &c) { return std::string(to_string(c.mode)); },
            [](SystemConfig &c, const std::string &m) { c.mode = parse_solver_mode(m); })
        .def_property_readonly("wavelength", &SystemConfig::wavelength)
        .def_property_readonly("gamma", &SystemConfig::gamma)
        .def_property_readonly("num_elements", &SystemConfig::num_elements)
        .def("validate", &SystemConfig::validate)
        .def("dump", [](const SystemConfig &c) { return dump_config(c); });

    m.def("load_scene", [](const std::string &text) { return load_scene(text); }, py::arg("text"));
    m.def("load_config", [](const std::string &text) { return load_config(text); }, py::arg("text"));

    m.def("edge_weight", &edge_weight, py::arg("distance"), py::arg("scale"));
    m.def("max_path_gain", &max_path_gain, py::arg("kappa"), py::arg("num_ris"), py::arg("num_elements"), py::arg("n_bs_antennas"));
    m.def(
        "user_power_allocation", [](const std::vector<double> &gains)
        {
            const auto split = user_power_allocation(gains);
            return py::make_tuple(split.fractions, split.power); },
        py::arg("gains"));

    m.def(
        "candidate_paths", [](const Scene &scene, const SystemConfig &cfg, NodeId user)
        {
            py::list out;
            for (const auto &p : candidate_paths(scene, cfg, build_los_graph(scene, cfg), user, cfg.candidates_per_user))
                out.append(path_dict(p));
            return out; },
        py::arg("scene"), py::arg("config"), py::arg("user"));

    m.def(
        "solve_report", [](const Scene &scene, const SystemConfig &cfg)
        {
            py::gil_scoped_release release;
            return solve_report(scene, cfg); },
        py::arg("scene"), py::arg("config"));

    m.def(
        "validate", [](const Scene &scene, const SystemConfig &cfg, std::uint64_t seed, double beta_fault)
        {
            cli::ValidateOptions opts;
            opts.seed = seed;
            opts.beta_fault = beta_fault;
            std::vector<std::tuple<std::string, bool, std::string>> rows;
            for (const auto &r : cli::run_validation(scene, cfg, opts))
                rows.emplace_back(r.property, r.passed, r.detail);
            return rows; },
        py::arg("scene"), py::arg("config"), py::arg("seed") = 1, py::arg("beta_fault") = 0.0);

    m.def(
        "sweep_csv", [](const Scene &scene, const SystemConfig &cfg, const std::string &param, const std::string &values,
                        std::uint64_t seed, int workers, bool omit_timing)
        {
            cli::SweepSpec spec;
            spec.param = cli::parse_sweep_param(param);
            spec.values = cli::expand_values(spec.param, values);
            spec.seed = seed;
            spec.workers = workers;
            spec.omit_timing = omit_timing;
            py::gil_scoped_release release;
            return cli::sweep_csv(cli::run_sweep(scene, cfg, spec), omit_timing); },
        py::arg("scene"), py::arg("config"), py::arg("param"), py::arg("values"), py::arg("seed") = 0,
        py::arg("workers") = 1, py::arg("omit_timing") = true);
}
