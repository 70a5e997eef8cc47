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
"""Threshold-based R, P and T wave detection."""

import dataclasses
import math

import numpy as np
import scipy.signal

from edge_gateway.utils.errors import ParameterError

# Share of the RR interval after an R peak at which the T search of that
# beat ends and the P search of the next beat begins.
RR_SPLIT = 0.6


@dataclasses.dataclass(frozen=True, eq=False)
class WaveMarks:
    r_peaks: np.ndarray
    p_peaks: np.ndarray
    t_peaks: np.ndarray

    @classmethod
    def empty(cls):
        empty = np.zeros((0,), dtype="int64")
        return cls(empty, empty.copy(), empty.copy())


@dataclasses.dataclass(frozen=True)
class DetectionConfig:
    """Detection thresholds (mV) and search windows (ms relative to R)."""

    r_threshold: float = 1.0
    p_threshold: float = 0.08
    t_threshold: float = 0.1
    refractory: float = 200.0
    p_window: tuple = (-240.0, -40.0)
    t_window: tuple = (80.0, 400.0)

    def get_config(self):
        return {
            "r_threshold": self.r_threshold,
            "p_threshold": self.p_threshold,
            "t_threshold": self.t_threshold,
            "refractory": self.refractory,
            "p_window": list(self.p_window),
            "t_window": list(self.t_window),
        }

    @classmethod
    def from_config(cls, config):
        config = dict(config)
        for key in ("p_window", "t_window"):
            if key in config:
                config[key] = tuple(config[key])
        return cls(**config)


def _ms_to_samples(ms, sampling_rate):
    return int(round(ms * sampling_rate / 1000.0))


def _highest_peak(samples, start, stop, threshold):
    """Index of the highest local maximum above `threshold` in [start, stop)."""
    start = max(start, 1)
    stop = min(stop, len(samples) - 1)
    if stop <= start:
        return None
    # One sample of margin so maxima on the window edge are still found.
    segment = samples[start - 1 : stop + 1]
    peaks, _ = scipy.signal.find_peaks(segment)
    peaks = peaks + start - 1
    peaks = peaks[samples[peaks] > threshold]
    if len(peaks) == 0:
        return None
    return int(peaks[np.argmax(samples[peaks])])


def detect_waves(
    signal,
    r_threshold=1.0,
    p_threshold=0.08,
    t_threshold=0.1,
    refractory=200.0,
    p_window=(-240.0, -40.0),
    t_window=(80.0, 400.0),
):
    """Locate R, P and T peaks.

    R peaks are local maxima above `r_threshold` at least `refractory`
    milliseconds apart; when two candidates fall inside the refractory period
    the taller one is kept. For each R peak the tallest local maximum above
    `p_threshold` inside `p_window` is its P wave and the tallest above
    `t_threshold` inside `t_window` is its T wave. Windows are clipped so the
    T search of one beat and the P search of the next never overlap.

    Args:
        signal: `EcgSignal`.
        r_threshold: float. R amplitude threshold in mV.
        p_threshold: float. P amplitude threshold in mV.
        t_threshold: float. T amplitude threshold in mV.
        refractory: float. Minimum R to R distance in ms.
        p_window: pair of floats. P search window in ms relative to R.
        t_window: pair of floats. T search window in ms relative to R.

    Returns:
        A `WaveMarks`. Lists are empty when nothing is found.
    """
    for name, value in (
        ("r_threshold", r_threshold),
        ("p_threshold", p_threshold),
        ("t_threshold", t_threshold),
    ):
        if value <= 0:
            raise ParameterError(
                f"`{name}` must be positive. Received: {name}={value}"
            )
    if refractory < 0:
        raise ParameterError(
            f"`refractory` must be >= 0. Received: refractory={refractory}"
        )
    if p_window[0] >= p_window[1] or t_window[0] >= t_window[1]:
        raise ParameterError(
            "Search windows must be (start, end) with start < end. "
            f"Received: p_window={p_window}, t_window={t_window}"
        )

    samples = signal.samples
    fs = signal.sampling_rate
    if len(samples) < 3:
        return WaveMarks.empty()

    distance = max(1, math.ceil(refractory * fs / 1000.0))
    r_peaks, _ = scipy.signal.find_peaks(
        samples, height=r_threshold, distance=distance
    )
    r_peaks = r_peaks[samples[r_peaks] > r_threshold]

    p_lo, p_hi = (_ms_to_samples(ms, fs) for ms in p_window)
    t_lo, t_hi = (_ms_to_samples(ms, fs) for ms in t_window)
    p_peaks, t_peaks = [], []
    for i, r in enumerate(r_peaks):
        start = r + p_lo
        if i > 0:
            prev = r_peaks[i - 1]
            start = max(start, prev + math.ceil(RR_SPLIT * (r - prev)))
        p = _highest_peak(samples, start, r + p_hi + 1, p_threshold)
        if p is not None:
            p_peaks.append(p)

        stop = r + t_hi + 1
        if i + 1 < len(r_peaks):
            nxt = r_peaks[i + 1]
            stop = min(stop, r + math.ceil(RR_SPLIT * (nxt - r)))
        t = _highest_peak(samples, r + t_lo, stop, t_threshold)
        if t is not None:
            t_peaks.append(t)

    return WaveMarks(
        r_peaks=np.asarray(r_peaks, dtype="int64"),
        p_peaks=np.asarray(p_peaks, dtype="int64"),
        t_peaks=np.asarray(t_peaks, dtype="int64"),
    )


def heart_rate(r_peaks, sampling_rate):
    """Beat-to-beat heart rate in bpm, `60 / RR` for every R peak pair."""
    r_peaks = np.asarray(r_peaks, dtype="int64")
    if len(r_peaks) < 2:
        return np.zeros((0,), dtype="float64")
    intervals = np.diff(r_peaks)
    if np.any(intervals <= 0):
        raise ParameterError("`r_peaks` must be strictly increasing.")
    return 60.0 / (intervals / float(sampling_rate))
