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

"""Multi-path beam routing over cascaded STAR-RIS links."""

import csv
import io
import json
from pathlib import Path

from ._starbeam import (
    InfeasibleError,
    OracleError,
    PathError,
    Scene,
    SceneError,
    SystemConfig,
    candidate_paths,
    edge_weight,
    load_config,
    load_scene,
    max_path_gain,
    user_power_allocation,
)
from . import _starbeam

__all__ = [
    "InfeasibleError",
    "OracleError",
    "PathError",
    "Scene",
    "SceneError",
    "SystemConfig",
    "candidate_paths",
    "edge_weight",
    "load_config",
    "load_scene",
    "max_path_gain",
    "user_power_allocation",
    "read_scene",
    "read_config",
    "solve",
    "sweep",
    "validate",
]


def read_scene(path):
    return load_scene(Path(path).read_text())


def read_config(path):
    return load_config(Path(path).read_text())


def solve(scene, config):
    """Solution report as a dict; raises InfeasibleError when no selection serves every user."""
    return json.loads(_starbeam.solve_report(scene, config))


def sweep(scene, config, param, values, seed=0, workers=1):
    text = _starbeam.sweep_csv(scene, config, param, values, seed, workers, True)
    return list(csv.DictReader(io.StringIO(text)))


def validate(scene, config, seed=1, beta_fault=0.0):
    return [
        {"property": p, "passed": ok, "detail": d}
        for p, ok, d in _starbeam.validate(scene, config, seed, beta_fault)
    ]
