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
"""Stand-in models and canned recordings for the gateway tests."""

import numpy as np

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.synthetic import ARRHYTHMIA_SHAPE
from edge_gateway.dsp.synthetic import Segment
from edge_gateway.dsp.synthetic import synthesize_recording
from edge_gateway.gateway.stages import Chunk
from edge_gateway.gateway.stages import ChunkAnalysis
from edge_gateway.triage.triage_model import VERDICT_INDETERMINATE


class FixedTriage:
    """Triage model returning one verdict for every chunk with beats."""

    def __init__(self, verdict):
        self.verdict = verdict

    def classify(self, beats):
        return self.verdict if beats else VERDICT_INDETERMINATE


def make_analysis(
    index,
    verdict="normal",
    heart_rates=(60.0, 60.0),
    cnn_class=None,
    ground_truth=None,
    sampling_rate=500,
    chunk_seconds=10.0,
):
    """A `ChunkAnalysis` of a flat chunk with the given outcome."""
    size = int(chunk_seconds * sampling_rate)
    chunk = Chunk(
        index=index,
        signal=EcgSignal(np.zeros((size,)), sampling_rate),
        start_ms=int(index * chunk_seconds * 1000),
        ground_truth=ground_truth,
    )
    return ChunkAnalysis(
        chunk=chunk,
        verdict=verdict,
        beats=[],
        heart_rates=np.asarray(heart_rates, dtype="float64"),
        cnn_class=cnn_class,
    )


def arrhythmia_recording(seed=0):
    """60 s at 60 bpm with a 10 s burst of wide beats at 130 bpm at 30 s."""
    return synthesize_recording(
        [
            Segment(duration=30.0, heart_rate=60.0),
            Segment(
                duration=10.0,
                heart_rate=130.0,
                shape=ARRHYTHMIA_SHAPE,
                abnormal=True,
            ),
            Segment(duration=20.0, heart_rate=60.0),
        ],
        noise_std=0.02,
        seed=seed,
    )
