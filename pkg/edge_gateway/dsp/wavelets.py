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
"""Daubechies-4 discrete wavelet transform.

Each decomposition level splits the current approximation band into an
approximation and a detail band of `ceil(n / 2)` coefficients each, so the
sample count halves per level. Boundaries use periodic extension
(`"periodization"` in PyWavelets), the only extension that keeps both that
band size and perfect reconstruction for an orthogonal filter of length 8.
"""

import dataclasses
import math
from typing import List

import numpy as np
import pywt

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.ecg_signal import check_not_empty
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import StructureError

WAVELET_ID = "db4"
EXTENSION_MODE = "periodization"

# Daubechies-4 analysis low-pass taps (8 taps, 4 vanishing moments).
DB4_DEC_LO = np.array(
    [
        -0.010597401785069032,
        0.032883011666885200,
        0.030841381835560764,
        -0.18703481171909308,
        -0.027983769416859854,
        0.63088076792985891,
        0.71484657055291565,
        0.23037781330889650,
    ]
)
DB4_REC_LO = DB4_DEC_LO[::-1].copy()
# Quadrature mirror: dec_hi[k] = (-1)^(k + 1) * rec_lo[k].
DB4_DEC_HI = DB4_REC_LO * np.array([(-1) ** (k + 1) for k in range(8)])
DB4_REC_HI = DB4_DEC_HI[::-1].copy()

DB4 = pywt.Wavelet(
    WAVELET_ID,
    filter_bank=(
        DB4_DEC_LO.tolist(),
        DB4_DEC_HI.tolist(),
        DB4_REC_LO.tolist(),
        DB4_REC_HI.tolist(),
    ),
)


@dataclasses.dataclass(frozen=True, eq=False)
class WaveletLevel:
    approx: np.ndarray
    detail: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class WaveletCoeffs:
    """Multi-level db4 decomposition.

    `levels[0]` is the finest level. Only the last level's approximation band
    is needed for reconstruction; the intermediate approximations are kept so
    callers can inspect every level.
    """

    levels: List[WaveletLevel]
    original_length: int
    sampling_rate: int = 1
    wavelet_id: str = WAVELET_ID

    @property
    def num_levels(self):
        return len(self.levels)

    def band_lengths(self):
        return [len(level.approx) for level in self.levels]


def band_lengths(signal_len, num_levels):
    """Per-level band length, halving with `ceil` at every level."""
    lengths = []
    n = signal_len
    for _ in range(num_levels):
        n = math.ceil(n / 2)
        lengths.append(n)
    return lengths


def dwt(signal, num_levels=2):
    """Decompose `signal` into `num_levels` db4 levels.

    Args:
        signal: `EcgSignal`.
        num_levels: int. Number of decomposition levels.

    Returns:
        A `WaveletCoeffs`.
    """
    if int(num_levels) != num_levels or num_levels < 1:
        raise ParameterError(
            f"`num_levels` must be an integer >= 1. Received: {num_levels}"
        )
    check_not_empty(signal)
    n = len(signal)
    if n < 2**num_levels:
        raise ParameterError(
            f"A signal of {n} samples is too short for {num_levels} levels. "
            f"At least {2 ** num_levels} samples are required."
        )
    levels = []
    approx = signal.samples
    for _ in range(num_levels):
        approx, detail = pywt.dwt(approx, DB4, mode=EXTENSION_MODE)
        levels.append(WaveletLevel(approx=approx, detail=detail))
    return WaveletCoeffs(
        levels=levels,
        original_length=n,
        sampling_rate=signal.sampling_rate,
    )


def _check_structure(coeffs):
    if coeffs.wavelet_id != WAVELET_ID:
        raise StructureError(
            f"Only `{WAVELET_ID}` coefficients are supported. "
            f"Received: wavelet_id={coeffs.wavelet_id}"
        )
    if not coeffs.levels or coeffs.original_length < 1:
        raise StructureError("Coefficients must hold at least one level.")
    expected = band_lengths(coeffs.original_length, len(coeffs.levels))
    for index, (level, length) in enumerate(zip(coeffs.levels, expected)):
        if len(level.approx) != length or len(level.detail) != length:
            raise StructureError(
                f"Level {index + 1} bands must hold {length} coefficients for "
                f"original_length={coeffs.original_length}. Received: "
                f"approx={len(level.approx)}, detail={len(level.detail)}"
            )


def idwt(coeffs):
    """Reconstruct the signal of `original_length` samples."""
    _check_structure(coeffs)
    lengths = [coeffs.original_length] + band_lengths(
        coeffs.original_length, len(coeffs.levels)
    )
    approx = np.asarray(coeffs.levels[-1].approx, dtype="float64")
    for index in reversed(range(len(coeffs.levels))):
        detail = np.asarray(coeffs.levels[index].detail, dtype="float64")
        approx = pywt.idwt(approx, detail, DB4, mode=EXTENSION_MODE)
        # Odd lengths were extended by one sample on the way down.
        approx = approx[: lengths[index]]
    return EcgSignal(approx, coeffs.sampling_rate)


def wavelet_denoise(signal, num_levels=2, drop_levels=1):
    """Zero the `drop_levels` finest detail bands and reconstruct."""
    if not 0 <= drop_levels <= num_levels:
        raise ParameterError(
            "`drop_levels` must be in [0, num_levels]. "
            f"Received: drop_levels={drop_levels}, num_levels={num_levels}"
        )
    coeffs = dwt(signal, num_levels)
    levels = [
        WaveletLevel(
            approx=level.approx,
            detail=np.zeros_like(level.detail)
            if index < drop_levels
            else level.detail,
        )
        for index, level in enumerate(coeffs.levels)
    ]
    return idwt(dataclasses.replace(coeffs, levels=levels))


def wavelet_payload(coeffs, decimals=None):
    """The storage payload: the final approximation band plus metadata.

    `decimals` rounds the stored coefficients when given.
    """
    _check_structure(coeffs)
    approx = np.asarray(coeffs.levels[-1].approx, dtype="float64")
    if decimals is not None:
        approx = np.round(approx, decimals)
    return {
        "wavelet_id": coeffs.wavelet_id,
        "num_levels": coeffs.num_levels,
        "original_length": coeffs.original_length,
        "sampling_rate": coeffs.sampling_rate,
        "band_lengths": coeffs.band_lengths(),
        "approx": [float(v) for v in approx],
    }


def coeff_payload_reduction(signal_len, num_levels):
    """Fraction of samples saved by keeping only the final approx band."""
    if num_levels < 1:
        raise ParameterError(
            f"`num_levels` must be >= 1. Received: num_levels={num_levels}"
        )
    if signal_len < 1:
        raise ParameterError(
            f"`signal_len` must be >= 1. Received: signal_len={signal_len}"
        )
    retained = band_lengths(signal_len, num_levels)[-1]
    return 1.0 - retained / signal_len
