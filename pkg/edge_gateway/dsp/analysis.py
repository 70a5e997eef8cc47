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
"""Signal chain applied to every recording chunk."""

import dataclasses
from typing import List

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.features import BeatFeatures
from edge_gateway.dsp.features import extract_features
from edge_gateway.dsp.filters import preprocess
from edge_gateway.dsp.wave_detection import DetectionConfig
from edge_gateway.dsp.wave_detection import WaveMarks
from edge_gateway.dsp.wave_detection import detect_waves
from edge_gateway.dsp.wavelets import wavelet_denoise


@dataclasses.dataclass(frozen=True, eq=False)
class SignalAnalysis:
    signal: EcgSignal
    marks: WaveMarks
    beats: List[BeatFeatures]


def analyze_signal(
    signal,
    detection=None,
    band_low=0.5,
    band_high=40.0,
    ma_window=5,
    num_levels=2,
    drop_levels=1,
):
    """Clean a recording, then locate its waves and measure every beat.

    Recordings too short to decompose skip the wavelet step.

    Returns:
        A `SignalAnalysis` holding the cleaned signal, its wave marks and the
        per-beat features.
    """
    detection = detection or DetectionConfig()
    cleaned = preprocess(
        signal, band_low=band_low, band_high=band_high, ma_window=ma_window
    )
    if num_levels > 0 and len(cleaned) >= 2**num_levels:
        cleaned = wavelet_denoise(cleaned, num_levels, drop_levels)
    marks = detect_waves(cleaned, **detection.get_config())
    return SignalAnalysis(
        signal=cleaned,
        marks=marks,
        beats=extract_features(cleaned, marks),
    )
