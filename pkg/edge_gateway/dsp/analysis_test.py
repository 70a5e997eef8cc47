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
"""Tests for the per-chunk signal chain."""

import numpy as np
import tensorflow as tf

from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.dsp.wave_detection import DetectionConfig


class AnalyzeSignalTest(tf.test.TestCase):
    def test_noisy_recording(self):
        ecg = synthesize_ecg(
            10.0,
            heart_rate=75.0,
            noise_std=0.03,
            mains_amplitude=0.2,
            seed=1,
        )
        analysis = analyze_signal(ecg.signal)
        self.assertEqual(len(analysis.signal), len(ecg.signal))
        self.assertLen(analysis.marks.r_peaks, len(ecg.r_peaks))
        self.assertAllClose(analysis.marks.r_peaks, ecg.r_peaks, atol=2)
        self.assertLen(analysis.beats, len(ecg.r_peaks) - 1)
        for beat in analysis.beats:
            self.assertAllClose(beat.heart_rate, 75.0, atol=1.0)

    def test_flat_signal(self):
        analysis = analyze_signal(EcgSignal(np.zeros(5000), 500))
        self.assertEqual(len(analysis.marks.r_peaks), 0)
        self.assertEqual(analysis.beats, [])

    def test_short_signal_skips_wavelets(self):
        analysis = analyze_signal(EcgSignal(np.zeros(3), 500))
        self.assertEqual(len(analysis.signal), 3)

    def test_custom_detection(self):
        ecg = synthesize_ecg(5.0, heart_rate=60.0)
        analysis = analyze_signal(
            ecg.signal, detection=DetectionConfig(r_threshold=5.0)
        )
        self.assertEqual(len(analysis.marks.r_peaks), 0)
