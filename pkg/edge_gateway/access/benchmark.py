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
"""Latency benchmark of the KEM and signature instantiations."""

import dataclasses
import json
import time
from typing import List

import numpy as np
from absl import logging

from edge_gateway.access.kem import get_kem
from edge_gateway.access.signatures import get_signature_scheme
from edge_gateway.utils.errors import ParameterError

OPERATIONS = (
    "kem_keygen",
    "kem_encapsulate",
    "kem_decapsulate",
    "sig_keygen",
    "sig_sign",
    "sig_verify",
)


@dataclasses.dataclass(frozen=True)
class LatencyRow:
    """Latency statistics of one operation, in milliseconds."""

    operation: str
    algorithm: str
    iterations: int
    mean_ms: float
    p50_ms: float
    p95_ms: float
    min_ms: float
    max_ms: float

    @classmethod
    def from_samples(cls, operation, algorithm, samples):
        samples = np.asarray(samples, dtype="float64") * 1000.0
        return cls(
            operation=operation,
            algorithm=algorithm,
            iterations=len(samples),
            mean_ms=float(np.mean(samples)),
            p50_ms=float(np.percentile(samples, 50)),
            p95_ms=float(np.percentile(samples, 95)),
            min_ms=float(np.min(samples)),
            max_ms=float(np.max(samples)),
        )


@dataclasses.dataclass(frozen=True)
class BenchReport:
    rows: List[LatencyRow]

    def to_dict(self):
        rows = [dataclasses.asdict(row) for row in self.rows]
        return {"unit": "ms", "rows": rows}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self):
        lines = [
            f"{'operation':<17}{'algorithm':<20}"
            f"{'mean':>10}{'p50':>10}{'p95':>10}"
        ]
        for row in self.rows:
            lines.append(
                f"{row.operation:<17}{row.algorithm:<20}"
                f"{row.mean_ms:>10.4f}{row.p50_ms:>10.4f}{row.p95_ms:>10.4f}"
            )
        return "\n".join(lines)


def timed(fn):
    start = time.perf_counter()
    result = fn()
    return time.perf_counter() - start, result


def bench_crypto(iterations=100, kem=None, signature=None, message_size=1024):
    """Time key generation, encapsulation and signing round trips.

    Args:
        iterations: int. Repetitions of every operation.
        kem: `KEM` instance, defaults to `X25519Kem`.
        signature: `SignatureScheme` instance, defaults to Ed25519.
        message_size: int. Size of the signed message in bytes.

    Returns:
        A `BenchReport` with one row per entry of `OPERATIONS`.
    """
    if iterations < 1:
        raise ParameterError(
            f"`iterations` must be >= 1. Received: iterations={iterations}"
        )
    kem = kem or get_kem()
    signature = signature or get_signature_scheme()
    message = bytes(message_size)
    samples = {name: [] for name in OPERATIONS}
    for _ in range(iterations):
        elapsed, kem_keys = timed(kem.generate_keypair)
        samples["kem_keygen"].append(elapsed)
        elapsed, (ciphertext, _) = timed(
            lambda: kem.encapsulate(kem_keys.public_key)
        )
        samples["kem_encapsulate"].append(elapsed)
        elapsed, _ = timed(
            lambda: kem.decapsulate(kem_keys.secret_key, ciphertext)
        )
        samples["kem_decapsulate"].append(elapsed)

        elapsed, sig_keys = timed(signature.generate_keypair)
        samples["sig_keygen"].append(elapsed)
        elapsed, signed = timed(
            lambda: signature.sign(sig_keys.secret_key, message)
        )
        samples["sig_sign"].append(elapsed)
        elapsed, _ = timed(
            lambda: signature.verify(sig_keys.public_key, message, signed)
        )
        samples["sig_verify"].append(elapsed)

    rows = []
    for name in OPERATIONS:
        algorithm = signature.algorithm_id
        if name.startswith("kem"):
            algorithm = kem.algorithm_id
        rows.append(LatencyRow.from_samples(name, algorithm, samples[name]))
    logging.info(
        "Benchmarked %s and %s.", kem.algorithm_id, signature.algorithm_id
    )
    return BenchReport(rows)
