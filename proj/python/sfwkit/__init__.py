# Copyright 2026 The Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Stochastic Frank-Wolfe toolkit."""

from ._sfw import (
    FeasibleSet,
    PartitionMatroid,
    Problem,
    RngStream,
    SfwError,
    brute_force_opt,
    build_problem,
    contains,
    default_start,
    diameter,
    exact_variance,
    fw_gap,
    level_bits,
    lmo_max,
    lmo_min,
    logistic_synthetic,
    message_bits,
    oblivious_sfw,
    one_sfw,
    quadratic,
    quantize,
    run_experiment,
    run_qfw,
)

__all__ = [
    "FeasibleSet",
    "PartitionMatroid",
    "Problem",
    "RngStream",
    "SfwError",
    "brute_force_opt",
    "build_problem",
    "contains",
    "default_start",
    "diameter",
    "exact_variance",
    "fw_gap",
    "level_bits",
    "lmo_max",
    "lmo_min",
    "logistic_synthetic",
    "message_bits",
    "oblivious_sfw",
    "one_sfw",
    "quadratic",
    "quantize",
    "run_experiment",
    "run_qfw",
]
