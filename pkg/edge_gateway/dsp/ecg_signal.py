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
"""Single-lead ECG signal container and its CSV file format."""

import dataclasses

import numpy as np

from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError

HEADER_PREFIX = "fs="


@dataclasses.dataclass(frozen=True, eq=False)
class EcgSignal:
    """Millivolt samples of one ECG lead.

    Args:
        samples: 1D float array of amplitudes in millivolts.
        sampling_rate: int. Sampling rate in Hz.
    """

    samples: np.ndarray
    sampling_rate: int

    def __post_init__(self):
        if int(self.sampling_rate) != self.sampling_rate or (
            self.sampling_rate <= 0
        ):
            raise ParameterError(
                "`sampling_rate` must be a positive integer. "
                f"Received: sampling_rate={self.sampling_rate}"
            )
        samples = np.asarray(self.samples, dtype="float64").reshape(-1)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sampling_rate", int(self.sampling_rate))

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        """Duration in seconds."""
        return len(self.samples) / self.sampling_rate

    def with_samples(self, samples):
        return EcgSignal(samples, self.sampling_rate)


def check_not_empty(signal):
    if len(signal) == 0:
        raise EmptyInputError("`signal` must contain at least one sample.")


def read_signal_csv(path):
    """Read a signal file: a `fs=<Hz>` header, then one sample per line."""
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].strip().startswith(HEADER_PREFIX):
        raise FormatError(
            f"Signal file {path} must start with a `fs=<Hz>` header line."
        )
    try:
        sampling_rate = float(lines[0].strip()[len(HEADER_PREFIX) :])
    except ValueError:
        raise FormatError(f"Invalid header in {path}: {lines[0]!r}")
    if not sampling_rate.is_integer() or sampling_rate <= 0:
        raise FormatError(
            f"Sampling rate in {path} must be a positive integer. "
            f"Received: {lines[0]!r}"
        )
    samples = []
    for line_number, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        try:
            samples.append(float(line))
        except ValueError:
            raise FormatError(
                f"Line {line_number} of {path} is not a number: {line!r}"
            )
    return EcgSignal(np.asarray(samples, dtype="float64"), int(sampling_rate))


def write_signal_csv(path, signal):
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{HEADER_PREFIX}{signal.sampling_rate}\n")
        for value in signal.samples:
            f.write(f"{float(value)!r}\n")
