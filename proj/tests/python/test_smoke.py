# SPDX-License-Identifier: Apache-2.0
#
# starbeam: multi-path beam routing over cascaded STAR-RIS links
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

import math
from pathlib import Path

import pytest

import starbeam

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture
def single():
    return starbeam.read_scene(DATA / "single_user_scene.json")


@pytest.fixture
def multi():
    return starbeam.read_scene(DATA / "multi_user_scene.json")


@pytest.fixture
def config():
    return starbeam.read_config(DATA / "config.json")


def test_scene_loads(single, multi):
    assert (single.num_ris, single.num_users) == (8, 1)
    assert (multi.num_ris, multi.num_users) == (10, 5)
    again = starbeam.load_scene(single.dump())
    assert again.dump() == single.dump()


def test_config_defaults(config):
    assert config.mode == "star_es"
    assert config.num_elements == 196
    assert 10 * math.log10(config.gamma) == pytest.approx(-46.43, abs=5e-3)


def test_edge_weight_and_gain():
    assert starbeam.edge_weight(10.0, 196.0) == pytest.approx(math.log(10 / 196), rel=1e-15)
    assert starbeam.max_path_gain(1.0, 1, 4, 1) == 16.0


def test_user_split():
    fractions, power = starbeam.user_power_allocation([10.0, 40.0])
    assert fractions == pytest.approx([0.8, 0.2], rel=1e-15)
    assert power == pytest.approx(8.0, rel=1e-15)


def test_solve_single_user(single, config):
    report = starbeam.solve(single, config)
    assert report["status"] == "ok"
    total = sum(p["f_hat_linear"] for p in report["paths"])
    assert report["objective_linear"] == pytest.approx(total, rel=1e-12)
    assert report["oracle"]["isolated"]["relative_error"] < 1e-9
    assert report["config"]["m0"] == 14


def test_reflect_only_infeasible_for_side_room_user(multi, config):
    config.mode = "reflect_only"
    with pytest.raises(starbeam.InfeasibleError):
        starbeam.solve(multi, config)
    assert starbeam.solve(multi.with_users(2), config)["status"] == "ok"


def test_candidates_ranked(single, config):
    paths = starbeam.candidate_paths(single, config, single.user_nodes[0])
    assert 0 < len(paths) <= config.candidates_per_user
    gains = [p["f_hat"] for p in paths]
    assert gains == sorted(gains, reverse=True)


def test_validate_passes(single, config):
    rows = starbeam.validate(single, config)
    assert all(r["passed"] for r in rows), rows
    faulty = {r["property"]: r["passed"] for r in starbeam.validate(single, config, beta_fault=0.5)}
    assert not faulty["proposition1_equality"]


def test_sweep_deterministic(single, config):
    first = starbeam.sweep(single, config, "s", "1:1:6", workers=2)
    second = starbeam.sweep(single, config, "s", "1:1:6", workers=1)
    assert first == second
    assert len(first) == 18


def test_bad_scene_raises():
    with pytest.raises(starbeam.SceneError):
        starbeam.load_scene('{"nodes": [], "los_pairs": []}')
