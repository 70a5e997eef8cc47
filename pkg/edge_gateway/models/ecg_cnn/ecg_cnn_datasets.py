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
"""Beat datasets: file format, sampling strategies and splits."""

import csv
import dataclasses
import math

import numpy as np
import scipy.signal
from absl import logging

from edge_gateway.utils.errors import DataError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError

SEQUENCE_LENGTH = 187
NUM_CLASSES = 5
# Sampling rate of the stored beats.
BEAT_SAMPLING_RATE = 125
# Beats span this many median RR intervals starting at their R peak.
BEAT_WINDOW_RR = 1.2

SAMPLING_KINDS = ("unbalanced", "oversampled", "undersampled")


@dataclasses.dataclass(frozen=True, eq=False)
class BeatRecord:
    samples: np.ndarray
    label: int


@dataclasses.dataclass(frozen=True, eq=False)
class BeatDataset:
    """Fixed-length beats and their class labels.

    Args:
        samples: float array of shape `[num_beats, sequence_length]`.
        labels: int array of shape `[num_beats]`.
    """

    samples: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype="float64")
        if samples.ndim == 1 and samples.size == 0:
            samples = samples.reshape(0, SEQUENCE_LENGTH)
        labels = np.asarray(self.labels, dtype="int64").reshape(-1)
        if samples.ndim != 2 or len(samples) != len(labels):
            raise DataError(
                "`samples` must be `[num_beats, sequence_length]` with one "
                f"label per beat. Received: samples.shape={samples.shape}, "
                f"labels.shape={labels.shape}"
            )
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_records(cls, records, sequence_length=SEQUENCE_LENGTH):
        records = list(records)
        if not records:
            return cls(np.zeros((0, sequence_length)), np.zeros(0))
        return cls(
            np.stack([record.samples for record in records]),
            [record.label for record in records],
        )

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, index):
        return BeatRecord(self.samples[index], int(self.labels[index]))

    def __iter__(self):
        for index in range(len(self)):
            yield self[index]

    @property
    def sequence_length(self):
        return self.samples.shape[1]

    def take(self, indices):
        indices = np.asarray(indices, dtype="int64")
        return BeatDataset(self.samples[indices], self.labels[indices])

    def class_counts(self, num_classes=NUM_CLASSES):
        return np.bincount(self.labels, minlength=num_classes)[:num_classes]


def load_beats(path, sequence_length=SEQUENCE_LENGTH, num_classes=NUM_CLASSES):
    """Read a beat CSV: `sequence_length` floats then the label, no header.

    Labels may be written as floats (`2.0`) as long as they are integral.

    Raises:
        FormatError: a row is ragged, holds a non-number, or its label is out
            of range. The message names the 1-based row.
    """
    samples = []
    labels = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for row_number, row in enumerate(csv.reader(f), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != sequence_length + 1:
                raise FormatError(
                    f"Row {row_number} of {path} has {len(row)} columns, "
                    f"expected {sequence_length + 1}."
                )
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                raise FormatError(
                    f"Row {row_number} of {path} holds a non-numeric value."
                )
            label = values[-1]
            if not label.is_integer() or not 0 <= label < num_classes:
                raise FormatError(
                    f"Row {row_number} of {path} has label {row[-1]!r}, "
                    f"expected an integer in [0, {num_classes})."
                )
            samples.append(values[:-1])
            labels.append(int(label))

    dataset = BeatDataset(
        np.asarray(samples, dtype="float64").reshape(-1, sequence_length),
        np.asarray(labels, dtype="int64"),
    )
    logging.info(
        "Loaded %d beats from %s, class histogram %s",
        len(dataset),
        path,
        dataset.class_counts(num_classes).tolist(),
    )
    return dataset


def write_beats(path, dataset):
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        for samples, label in zip(dataset.samples, dataset.labels):
            writer.writerow([repr(float(v)) for v in samples] + [int(label)])


@dataclasses.dataclass(frozen=True)
class SamplingStrategy:
    """How classes are rebalanced before training.

    Args:
        kind: string. `"unbalanced"` keeps the data as is, `"oversampled"`
            draws extra beats with replacement until every class has as many
            beats as the largest one, `"undersampled"` keeps a random subset
            of every class the size of the smallest one.
        seed: int. Seed of the draws.
    """

    kind: str = "unbalanced"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SAMPLING_KINDS:
            raise ParameterError(
                f"`kind` must be one of {SAMPLING_KINDS}. "
                f"Received: kind={self.kind}"
            )


def _class_indices(dataset, num_classes):
    present = np.unique(dataset.labels)
    classes = present if num_classes is None else np.arange(num_classes)
    indices = {int(c): np.flatnonzero(dataset.labels == c) for c in classes}
    empty = [c for c, members in indices.items() if len(members) == 0]
    if empty or not indices:
        raise DataError(
            "Every class needs at least one beat to rebalance. "
            f"Empty classes: {empty}"
        )
    return indices


def resample(dataset, strategy, num_classes=None):
    """Rebalance `dataset` according to `strategy`.

    Args:
        dataset: `BeatDataset`.
        strategy: `SamplingStrategy`.
        num_classes: int or `None`. When given, every class in
            `[0, num_classes)` must be present, otherwise only the classes
            found in the data are balanced.

    Returns:
        A new `BeatDataset`. Rebalanced outputs are shuffled with the
        strategy seed, the unbalanced output is `dataset` unchanged.
    """
    if strategy.kind == "unbalanced":
        return dataset
    rng = np.random.default_rng(strategy.seed)
    indices = _class_indices(dataset, num_classes)
    counts = [len(members) for members in indices.values()]
    selected = []
    if strategy.kind == "oversampled":
        target = max(counts)
        for members in indices.values():
            extra = rng.choice(members, target - len(members), replace=True)
            selected.append(np.concatenate([members, extra]))
    else:
        target = min(counts)
        for members in indices.values():
            selected.append(np.sort(rng.choice(members, target, replace=False)))
    order = rng.permutation(np.concatenate(selected))
    logging.info(
        "Resampled %d beats to %d (%s, %d per class)",
        len(dataset),
        len(order),
        strategy.kind,
        target,
    )
    return dataset.take(order)


def stratified_split(dataset, validation_fraction=0.1, seed=0):
    """Split off `validation_fraction` of every class.

    Returns:
        `(train, validation)` datasets, each keeping the original order.
    """
    if not 0.0 <= validation_fraction < 1.0:
        raise ParameterError(
            "`validation_fraction` must be in [0, 1). "
            f"Received: validation_fraction={validation_fraction}"
        )
    rng = np.random.default_rng(seed)
    validation = []
    for label in np.unique(dataset.labels):
        members = np.flatnonzero(dataset.labels == label)
        count = int(round(len(members) * validation_fraction))
        validation.append(rng.permutation(members)[:count])
    validation = np.sort(np.concatenate(validation or [np.zeros(0, "int64")]))
    mask = np.ones(len(dataset), dtype=bool)
    mask[validation.astype("int64")] = False
    return dataset.take(np.flatnonzero(mask)), dataset.take(validation)


def stratified_subset(dataset, fraction, seed=0):
    """Keep `fraction` of every class, at least one beat per present class."""
    if not 0.0 < fraction <= 1.0:
        raise ParameterError(
            f"`fraction` must be in (0, 1]. Received: fraction={fraction}"
        )
    rng = np.random.default_rng(seed)
    kept = []
    for label in np.unique(dataset.labels):
        members = np.flatnonzero(dataset.labels == label)
        count = max(1, math.ceil(len(members) * fraction))
        kept.append(rng.permutation(members)[:count])
    if not kept:
        return dataset
    return dataset.take(np.sort(np.concatenate(kept)))


def normalize_beat(samples, sequence_length=SEQUENCE_LENGTH):
    """Scale to [0, 1], then truncate or zero-pad to `sequence_length`."""
    samples = np.asarray(samples, dtype="float64")[:sequence_length]
    span = np.ptp(samples) if len(samples) else 0.0
    if span > 0:
        samples = (samples - samples.min()) / span
    else:
        samples = np.zeros_like(samples)
    return np.pad(samples, (0, sequence_length - len(samples)))


def beats_from_signal(
    signal,
    r_peaks,
    sequence_length=SEQUENCE_LENGTH,
    beat_rate=BEAT_SAMPLING_RATE,
):
    """Cut a recording into beats laid out like the stored dataset.

    The signal is resampled to `beat_rate`, every beat starts at its R peak
    and spans 1.2 median RR intervals, and is then normalized with
    `normalize_beat`.

    Returns:
        Float array of shape `[len(r_peaks), sequence_length]`.
    """
    r_peaks = np.asarray(r_peaks, dtype="int64")
    if len(r_peaks) == 0:
        return np.zeros((0, sequence_length))
    divisor = math.gcd(beat_rate, signal.sampling_rate)
    resampled = scipy.signal.resample_poly(
        signal.samples,
        beat_rate // divisor,
        signal.sampling_rate // divisor,
    )
    scale = beat_rate / signal.sampling_rate
    starts = np.minimum(
        np.round(r_peaks * scale).astype("int64"), len(resampled) - 1
    )
    if len(starts) > 1:
        window = int(BEAT_WINDOW_RR * np.median(np.diff(starts)))
    else:
        window = sequence_length
    window = max(window, 1)
    return np.stack(
        [
            normalize_beat(resampled[start : start + window], sequence_length)
            for start in starts
        ]
    )


def synthetic_beats(
    per_class, num_classes=NUM_CLASSES, sequence_length=SEQUENCE_LENGTH, seed=0
):
    """Beats whose class sets the position of a single noisy bump.

    Used to bootstrap a classifier when no labelled beats are at hand.
    """
    rng = np.random.default_rng(seed)
    positions = np.linspace(15, sequence_length - 15, num_classes)
    time = np.arange(sequence_length)
    samples = []
    labels = []
    for label, center in enumerate(positions):
        bump = np.exp(-0.5 * ((time - center) / 4.0) ** 2)
        noise = rng.normal(0.0, 0.05, size=(per_class, sequence_length))
        samples.append(bump + noise)
        labels.extend([label] * per_class)
    return BeatDataset(np.concatenate(samples), labels)
