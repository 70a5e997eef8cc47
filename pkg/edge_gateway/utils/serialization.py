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
"""Canonical serialization used for every hashed or signed structure.

The canonical form is UTF-8 JSON with lexicographically sorted keys and no
insignificant whitespace. Byte strings are encoded as lowercase hex, so two
implementations produce bit-identical output for the same logical value.
"""

import dataclasses
import hashlib
import json

import numpy as np

DIGEST_SIZE = 32
ZERO_DIGEST = bytes(DIGEST_SIZE)


def to_canonical(value):
    """Convert `value` into plain JSON types, hex-encoding byte strings."""
    if isinstance(value, (bytes, bytearray)):
        return bytes(value).hex()
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            field.name: to_canonical(getattr(value, field.name))
            for field in dataclasses.fields(value)
        }
    if isinstance(value, dict):
        return {str(k): to_canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_canonical(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_canonical(v) for v in value.tolist()]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def canonical_json(value):
    """Return the canonical JSON text of `value`."""
    return json.dumps(
        to_canonical(value),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )


def canonical_bytes(value):
    return canonical_json(value).encode("utf-8")


def sha256(data):
    return hashlib.sha256(data).digest()


def digest_of(value):
    """Hash of the canonical serialization of `value`."""
    return sha256(canonical_bytes(value))


def derive_secret(seed, *parts):
    """32 bytes derived from a seed and a path of labels."""
    return sha256("/".join(str(p) for p in (seed,) + parts).encode())
