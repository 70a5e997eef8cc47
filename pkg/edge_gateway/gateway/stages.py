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
"""Monitor, Analyze and System Management stages of the control loop."""

import dataclasses
from typing import List
from typing import Optional

import numpy as np

from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.features import BeatFeatures
from edge_gateway.dsp.wave_detection import heart_rate
from edge_gateway.dsp.wavelets import dwt
from edge_gateway.dsp.wavelets import wavelet_payload
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import beats_from_signal
from edge_gateway.models.ecg_cnn.ecg_cnn_models import CLASS_NAMES
from edge_gateway.models.ecg_cnn.ecg_cnn_training import infer
from edge_gateway.triage.triage_model import VERDICT_ABNORMAL
from edge_gateway.triage.triage_model import VERDICT_INDETERMINATE
from edge_gateway.triage.triage_model import VERDICT_NORMAL
from edge_gateway.utils.errors import ConfigError

PRIORITY_URGENT = 3
RAW_DECIMALS = 4


@dataclasses.dataclass(frozen=True, eq=False)
class Chunk:
    """A fixed-duration window of the incoming stream."""

    index: int
    signal: EcgSignal
    start_ms: int
    partial: bool = False
    ground_truth: Optional[str] = None

    @property
    def end_ms(self):
        return self.start_ms + int(
            round(1000 * len(self.signal) / self.signal.sampling_rate)
        )


def monitor_ingest(signal, sampling_rate, chunk_seconds=10.0, labels=None):
    """Cut a stream into chunks of `chunk_seconds`, lazily.

    The rate is checked on the call. Chunks are cut as they are consumed.
    The last chunk is shorter and flagged `partial` when the stream does not
    divide evenly.

    Args:
        signal: `EcgSignal`.
        sampling_rate: int. The rate the gateway is configured for.
        chunk_seconds: float.
        labels: optional boolean array with one entry per sample, True where
            the recording is known to be abnormal. Sets each chunk's
            `ground_truth` by majority.

    Returns:
        An iterator of `Chunk`.

    Raises:
        ConfigError: the stream's rate differs from `sampling_rate`.
    """
    if signal.sampling_rate != sampling_rate:
        raise ConfigError(
            f"Stream is sampled at {signal.sampling_rate} Hz, the gateway is "
            f"configured for {sampling_rate} Hz."
        )
    size = int(round(chunk_seconds * sampling_rate))
    return _cut_chunks(signal, size, labels)


def _cut_chunks(signal, size, labels):
    sampling_rate = signal.sampling_rate
    for index, start in enumerate(range(0, len(signal), size)):
        samples = signal.samples[start : start + size]
        truth = None
        if labels is not None:
            abnormal = np.mean(np.asarray(labels[start : start + size]))
            truth = VERDICT_ABNORMAL if abnormal >= 0.5 else VERDICT_NORMAL
        yield Chunk(
            index=index,
            signal=signal.with_samples(samples),
            start_ms=int(round(1000 * start / sampling_rate)),
            partial=len(samples) < size,
            ground_truth=truth,
        )


@dataclasses.dataclass(frozen=True, eq=False)
class ChunkAnalysis:
    """Outcome of the Analyze stage for one chunk."""

    chunk: Chunk
    verdict: str
    beats: List[BeatFeatures]
    heart_rates: np.ndarray
    cnn_class: Optional[int] = None

    @property
    def analyzed(self):
        return self.verdict != VERDICT_INDETERMINATE

    @property
    def mean_heart_rate(self):
        if len(self.heart_rates) == 0:
            return None
        return float(np.mean(self.heart_rates))

    def summary(self):
        summary = {
            "chunk": self.chunk.index,
            "verdict": self.verdict,
            "beats": len(self.beats),
            "mean_hr_bpm": self.mean_heart_rate,
        }
        if self.cnn_class is not None:
            summary["class"] = self.cnn_class
            summary["class_name"] = CLASS_NAMES[self.cnn_class]
        return summary

    def feature_record(self, wavelet_levels=2):
        """Summary, beat features and the compressed chunk."""
        record = self.summary()
        record["start_ms"] = self.chunk.start_ms
        record["features"] = [list(beat.as_row()) for beat in self.beats]
        record["storage"] = "wavelet"
        record["wavelet"] = wavelet_payload(
            dwt(self.chunk.signal, wavelet_levels), decimals=RAW_DECIMALS
        )
        return record

    def raw_record(self):
        return {
            "chunk": self.chunk.index,
            "verdict": self.verdict,
            "storage": "raw",
            "start_ms": self.chunk.start_ms,
            "sampling_rate": self.chunk.signal.sampling_rate,
            "samples": np.round(self.chunk.signal.samples, RAW_DECIMALS),
        }


def analyze_chunk(chunk, knowledge):
    """Triage one chunk and classify abnormal ones with the CNN.

    A chunk without R peaks is indeterminate and gets no triage.

    Raises:
        StateError: a needed model is not loaded.
    """
    triage = knowledge.require("triage_model")
    analysis = analyze_signal(chunk.signal)
    r_peaks = analysis.marks.r_peaks
    if len(r_peaks) == 0:
        return ChunkAnalysis(
            chunk, VERDICT_INDETERMINATE, [], np.zeros((0,), "float64")
        )
    verdict = triage.classify(analysis.beats)
    cnn_class = None
    if verdict == VERDICT_ABNORMAL:
        cnn = knowledge.require("cnn_model")
        beats = beats_from_signal(analysis.signal, r_peaks)
        classes, _ = infer(cnn, beats)
        cnn_class = int(np.bincount(classes).argmax())
    return ChunkAnalysis(
        chunk=chunk,
        verdict=verdict,
        beats=list(analysis.beats),
        heart_rates=heart_rate(r_peaks, chunk.signal.sampling_rate),
        cnn_class=cnn_class,
    )


def _relaxed_thresholds(config, entries):
    """Raise the lowest heart-rate threshold after repeated false alarms."""
    false_alarms = sum(
        entry.priority > 0 and entry.ground_truth == VERDICT_NORMAL
        for entry in entries
    )
    if false_alarms < config.escalation_count:
        return None
    thresholds = sorted(config.heart_rate_thresholds)
    bpm, priority = thresholds[0]
    ceiling = config.max_threshold
    if len(thresholds) > 1:
        ceiling = min(ceiling, thresholds[1][0] - config.threshold_step)
    raised = min(bpm + config.threshold_step, ceiling)
    if raised <= bpm:
        return None
    return tuple([(raised, priority)] + thresholds[1:])


def system_manage(knowledge):
    """Reconfigure the gateway from its recent feedback.

    Looks at the last `feedback_window` entries. At least `escalation_count`
    priority-3 alerts halve the batch period, down to `min_batch_period`. A
    full window without alerts doubles it back, up to `max_batch_period`.
    At least `escalation_count` alerts on chunks labelled normal raise the
    lowest heart-rate threshold by `threshold_step`. Class labels and
    cryptographic parameters are never touched.

    Returns:
        The applied config delta, empty when nothing changed.
    """
    config = knowledge.config
    entries = knowledge.recent_feedback(config.feedback_window)
    if not entries:
        return {}
    delta = {}
    urgent = sum(entry.priority >= PRIORITY_URGENT for entry in entries)
    alerts = sum(entry.priority > 0 for entry in entries)
    period = config.batch_period
    if urgent >= config.escalation_count:
        period = max(config.min_batch_period, period / 2)
    elif alerts == 0 and len(entries) == config.feedback_window:
        period = min(config.max_batch_period, period * 2)
    if period != config.batch_period:
        delta["batch_period"] = period
    thresholds = _relaxed_thresholds(config, entries)
    if thresholds is not None:
        delta["heart_rate_thresholds"] = thresholds
    knowledge.update(delta)
    return delta
