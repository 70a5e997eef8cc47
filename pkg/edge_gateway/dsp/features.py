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
"""Per-beat clinical features and the feature CSV format."""

import csv
import dataclasses
from typing import Optional

import numpy as np

from edge_gateway.utils.errors import FormatError

FEATURE_COLUMNS = ("qrs_ms", "t_ms", "rr_s", "pr_ms", "st_ms", "hr_bpm")
# Fraction of the peak height (above baseline) that bounds a wave.
BOUNDARY_FRACTION = 0.1
# Width of the flat window used as the isoelectric reference, in ms.
BASELINE_WINDOW = 20.0


@dataclasses.dataclass(frozen=True)
class BeatFeatures:
    """Clinical features of one beat. `None` marks an absent value."""

    qrs_duration: Optional[float]
    t_wave_duration: Optional[float]
    rr_interval: Optional[float]
    pr_interval: Optional[float]
    st_segment: Optional[float]
    heart_rate: Optional[float]

    def as_row(self):
        return (
            self.qrs_duration,
            self.t_wave_duration,
            self.rr_interval,
            self.pr_interval,
            self.st_segment,
            self.heart_rate,
        )

    def as_array(self):
        """Float vector in `FEATURE_COLUMNS` order, `nan` when absent."""
        return np.array(
            [np.nan if v is None else v for v in self.as_row()],
            dtype="float64",
        )


def _crossing(samples, peak, level, limit, step):
    """Sub-sample position where the wave around `peak` falls to `level`."""
    j = peak
    while j != limit:
        nxt = j + step
        if samples[nxt] <= level:
            above, below = samples[j], samples[nxt]
            frac = (above - level) / (above - below) if above != below else 0
            return j + step * frac
        j = nxt
    return float(limit)


def _wave_bounds(samples, peak, baseline, lo, hi, fraction):
    level = baseline + fraction * (samples[peak] - baseline)
    onset = _crossing(samples, peak, level, max(lo, 0), -1)
    offset = _crossing(samples, peak, level, min(hi, len(samples) - 1), 1)
    return onset, offset


def _isoelectric_level(segment, width):
    """Mean of the flattest `width`-sample window of `segment`."""
    width = max(1, min(width, len(segment)))
    windows = np.lib.stride_tricks.sliding_window_view(segment, width)
    flattest = np.argmin(np.ptp(windows, axis=1))
    return float(np.mean(windows[flattest]))


def _mark_between(marks, lo, hi, last):
    """The last (or first) mark strictly inside (lo, hi), else None."""
    inside = marks[(marks > lo) & (marks < hi)]
    if len(inside) == 0:
        return None
    return int(inside[-1] if last else inside[0])


def extract_features(signal, marks, boundary_fraction=BOUNDARY_FRACTION):
    """Compute one `BeatFeatures` per beat that has a following R peak.

    Wave boundaries are the points, interpolated between samples, where the
    wave falls to `boundary_fraction` of its height above the beat baseline
    (the mean of the flattest short window between the two R peaks,
    normally the TP segment). Durations are in ms, the RR interval
    in seconds. Features that need a missing P or T mark are `None`.
    """
    samples = signal.samples
    fs = float(signal.sampling_rate)
    r_peaks = np.asarray(marks.r_peaks, dtype="int64")
    p_peaks = np.asarray(marks.p_peaks, dtype="int64")
    t_peaks = np.asarray(marks.t_peaks, dtype="int64")
    if len(r_peaks) < 2 or len(samples) == 0:
        return []
    baseline_width = int(round(BASELINE_WINDOW * fs / 1000.0))

    def to_ms(n_samples):
        return max(0.0, n_samples / fs * 1000.0)

    beats = []
    for i in range(len(r_peaks) - 1):
        r, nxt = int(r_peaks[i]), int(r_peaks[i + 1])
        prev = int(r_peaks[i - 1]) if i > 0 else -1
        p = _mark_between(p_peaks, prev, r, last=True)
        t = _mark_between(t_peaks, r, nxt, last=False)
        baseline = _isoelectric_level(samples[r : nxt + 1], baseline_width)

        qrs_lo = p if p is not None else max(prev, 0)
        qrs_hi = t if t is not None else nxt
        qrs_on, qrs_off = _wave_bounds(
            samples, r, baseline, qrs_lo, qrs_hi, boundary_fraction
        )

        pr_interval = None
        if p is not None:
            p_on, _ = _wave_bounds(
                samples, p, baseline, max(prev, 0), r, boundary_fraction
            )
            pr_interval = to_ms(qrs_on - p_on)

        t_duration = st_segment = None
        if t is not None:
            t_on, t_off = _wave_bounds(
                samples, t, baseline, r, nxt, boundary_fraction
            )
            t_duration = to_ms(t_off - t_on)
            st_segment = to_ms(t_on - qrs_off)

        rr = (nxt - r) / fs
        beats.append(
            BeatFeatures(
                qrs_duration=to_ms(qrs_off - qrs_on),
                t_wave_duration=t_duration,
                rr_interval=rr,
                pr_interval=pr_interval,
                st_segment=st_segment,
                heart_rate=60.0 / rr,
            )
        )
    return beats


def write_features_csv(path, beats, labels=None, label_column="label"):
    """Write a feature file, with a trailing label column if `labels`."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        header = list(FEATURE_COLUMNS)
        if labels is not None:
            header.append(label_column)
        writer.writerow(header)
        for index, beat in enumerate(beats):
            row = ["" if v is None else repr(float(v)) for v in beat.as_row()]
            if labels is not None:
                row.append(str(int(labels[index])))
            writer.writerow(row)


def read_features_csv(path, label_column=None):
    """Read a feature file.

    Returns:
        The list of `BeatFeatures`, plus the list of integer labels when
        `label_column` names an extra column.
    """
    beats, labels = [], []
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(FEATURE_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise FormatError(
                f"{path} is missing feature columns {sorted(missing)}."
            )
        for row_number, row in enumerate(reader, start=2):
            try:
                values = [
                    float(row[c]) if row[c] not in ("", None) else None
                    for c in FEATURE_COLUMNS
                ]
                if label_column is not None:
                    labels.append(int(row[label_column]))
            except (KeyError, TypeError, ValueError) as e:
                raise FormatError(f"Row {row_number} of {path}: {e}")
            beats.append(BeatFeatures(*values))
    if label_column is not None:
        return beats, labels
    return beats
