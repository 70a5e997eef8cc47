# Copyright 2023 The EdgeGateway Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Stake-weighted proposer selection."""

import bisect
import dataclasses
import itertools
import struct

from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import sha256


@dataclasses.dataclass(frozen=True)
class Validator:
    id: str
    stake: int


def select_proposer(validators, round_number, seed=0):
    """Pick the proposer of `round_number`.

    `sha256(seed || round)` is read as a big integer and reduced onto the
    cumulative stake of the validators, sorted by id, so every validator
    wins with probability proportional to its stake.

    Returns:
        The id of the selected validator.
    """
    validators = sorted(validators, key=lambda v: v.id)
    if any(v.stake < 0 or int(v.stake) != v.stake for v in validators):
        raise ParameterError(
            "Stakes must be non-negative integers. "
            f"Received: {[(v.id, v.stake) for v in validators]}"
        )
    total = sum(v.stake for v in validators)
    if total <= 0:
        raise ParameterError(
            "Total stake must be positive to select a proposer. "
            f"Received: total_stake={total}"
        )
    if seed < 0 or round_number < 0:
        raise ParameterError(
            "`seed` and `round_number` must be >= 0. "
            f"Received: seed={seed}, round_number={round_number}"
        )
    digest = sha256(struct.pack(">QQ", seed, round_number))
    ticket = int.from_bytes(digest, "big") % total
    cumulative = list(itertools.accumulate(v.stake for v in validators))
    return validators[bisect.bisect_right(cumulative, ticket)].id
