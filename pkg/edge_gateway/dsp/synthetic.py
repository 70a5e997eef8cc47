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
"""Deterministic synthetic ECG with known wave landmarks.

Each beat is the sum of three Gaussian bumps (P, QRS and T) on a flat
baseline. Wave widths are given as durations measured at
`BOUNDARY_FRACTION` of the wave height, the same convention
`extract_features` uses, so generated landmarks double as test oracles.
"""

import dataclasses

import numpy as np

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.features import BOUNDARY_FRACTION
from edge_gateway.utils.errors import ParameterError

# Half-width of a unit Gaussian at `BOUNDARY_FRACTION` of its height.
_HALF_WIDTH_SIGMAS = np.sqrt(2.0 * np.log(1.0 / BOUNDARY_FRACTION))


@dataclasses.dataclass(frozen=True)
class BeatShape:
    """Morphology of one synthetic beat. Times are in ms, amplitudes in mV."""

    r_amplitude: float = 1.6
    p_amplitude: float = 0.3
    t_amplitude: float = 0.4
    qrs_duration: float = 90.0
    p_duration: float = 100.0
    t_duration: float = 160.0
    p_offset: float = -160.0
    # T peak position as a share of the RR interval.
    t_rr_fraction: float = 0.35


@dataclasses.dataclass(frozen=True)
class Segment:
    duration: float
    heart_rate: float = 75.0
    shape: BeatShape = BeatShape()
    abnormal: bool = False


@dataclasses.dataclass(frozen=True, eq=False)
class SyntheticEcg:
    signal: EcgSignal
    r_peaks: np.ndarray
    p_peaks: np.ndarray
    t_peaks: np.ndarray
    # Per-sample ground truth, True inside abnormal segments.
    abnormal_mask: np.ndarray


def _sigma(duration_ms, sampling_rate):
    return duration_ms / 2.0 / _HALF_WIDTH_SIGMAS * sampling_rate / 1000.0


def _add_wave(samples, center, amplitude, sigma):
    span = int(np.ceil(6 * sigma)) + 1
    lo, hi = max(0, center - span), min(len(samples), center + span + 1)
    if hi <= lo:
        return
    x = np.arange(lo, hi) - center
    samples[lo:hi] += amplitude * np.exp(-0.5 * (x / sigma) ** 2)


def synthesize_recording(
    segments,
    sampling_rate=500,
    first_beat=0.5,
    noise_std=0.0,
    mains_amplitude=0.0,
    mains_frequency=50.0,
    seed=0,
):
    """Render consecutive rhythm segments into one recording.

    Args:
        segments: list of `Segment`.
        sampling_rate: int. Output rate in Hz.
        first_beat: float. Time of the first R peak in seconds.
        noise_std: float. Standard deviation of additive white noise in mV.
        mains_amplitude: float. Amplitude of a mains hum tone in mV.
        mains_frequency: float. Mains frequency in Hz.
        seed: int. Noise seed.

    Returns:
        A `SyntheticEcg`.
    """
    if not segments:
        raise ParameterError("`segments` must not be empty.")
    total = sum(segment.duration for segment in segments)
    n = int(round(total * sampling_rate))
    samples = np.zeros((n,), dtype="float64")
    abnormal = np.zeros((n,), dtype=bool)
    r_peaks, p_peaks, t_peaks = [], [], []

    segment_start = 0.0
    next_beat = int(round(first_beat * sampling_rate))
    for segment in segments:
        if segment.heart_rate <= 0 or segment.duration <= 0:
            raise ParameterError(
                "Segments need a positive `duration` and `heart_rate`. "
                f"Received: {segment}"
            )
        segment_end = segment_start + segment.duration
        lo = int(round(segment_start * sampling_rate))
        hi = min(n, int(round(segment_end * sampling_rate)))
        abnormal[lo:hi] = segment.abnormal
        rr = int(round(60.0 / segment.heart_rate * sampling_rate))
        shape = segment.shape
        while next_beat < hi:
            r = next_beat
            p = r + int(round(shape.p_offset * sampling_rate / 1000.0))
            t = r + int(round(shape.t_rr_fraction * rr))
            _add_wave(
                samples,
                r,
                shape.r_amplitude,
                _sigma(shape.qrs_duration, sampling_rate),
            )
            _add_wave(
                samples,
                p,
                shape.p_amplitude,
                _sigma(shape.p_duration, sampling_rate),
            )
            _add_wave(
                samples,
                t,
                shape.t_amplitude,
                _sigma(shape.t_duration, sampling_rate),
            )
            r_peaks.append(r)
            if p >= 0:
                p_peaks.append(p)
            if t < n:
                t_peaks.append(t)
            next_beat += rr
        segment_start = segment_end

    if mains_amplitude:
        time = np.arange(n) / sampling_rate
        samples += mains_amplitude * np.sin(2 * np.pi * mains_frequency * time)
    if noise_std:
        rng = np.random.default_rng(seed)
        samples += rng.normal(0.0, noise_std, size=n)

    return SyntheticEcg(
        signal=EcgSignal(samples, sampling_rate),
        r_peaks=np.asarray(r_peaks, dtype="int64"),
        p_peaks=np.asarray(p_peaks, dtype="int64"),
        t_peaks=np.asarray(t_peaks, dtype="int64"),
        abnormal_mask=abnormal,
    )


def synthesize_ecg(duration, heart_rate=75.0, sampling_rate=500, **kwargs):
    """Single-rhythm recording. `kwargs` go to `synthesize_recording`."""
    shape = kwargs.pop("shape", BeatShape())
    return synthesize_recording(
        [Segment(duration=duration, heart_rate=heart_rate, shape=shape)],
        sampling_rate=sampling_rate,
        **kwargs,
    )


# Wide, fast beats standing in for a ventricular arrhythmia.
ARRHYTHMIA_SHAPE = BeatShape(r_amplitude=1.8, qrs_duration=150.0)
