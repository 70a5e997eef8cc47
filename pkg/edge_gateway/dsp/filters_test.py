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
"""Tests for ECG band-pass conditioning."""

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.filters import preprocess
from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import ParameterError


def tone(frequency, duration=10.0, sampling_rate=500):
    time = np.arange(int(duration * sampling_rate)) / sampling_rate
    return EcgSignal(np.sin(2 * np.pi * frequency * time), sampling_rate)


def rms(x):
    return np.sqrt(np.mean(np.square(x)))


def tone_magnitude(samples, frequency, sampling_rate):
    spectrum = np.abs(np.fft.rfft(samples))
    freqs = np.fft.rfftfreq(len(samples), d=1.0 / sampling_rate)
    return spectrum[np.argmin(np.abs(freqs - frequency))]


class PreprocessTest(tf.test.TestCase, parameterized.TestCase):
    def test_length_and_rate_preserved(self):
        signal = tone(5.0, duration=3.0)
        outputs = preprocess(signal)
        self.assertLen(outputs, len(signal))
        self.assertEqual(outputs.sampling_rate, 500)

    def test_removes_dc(self):
        signal = EcgSignal(np.ones(5000), 500)
        outputs = preprocess(signal, band_low=0.5, band_high=40.0)
        self.assertLess(abs(np.mean(outputs.samples)), 0.01)

    def test_attenuates_mains(self):
        signal = tone(50.0)
        outputs = preprocess(signal, band_low=0.5, band_high=40.0)
        self.assertLessEqual(
            rms(outputs.samples), 0.1 * rms(signal.samples)
        )
        self.assertLessEqual(
            tone_magnitude(outputs.samples, 50.0, 500),
            0.1 * tone_magnitude(signal.samples, 50.0, 500),
        )

    def test_passes_in_band_tone(self):
        signal = tone(5.0)
        outputs = preprocess(signal)
        self.assertGreaterEqual(
            rms(outputs.samples), 0.7 * rms(signal.samples)
        )
        self.assertGreaterEqual(
            tone_magnitude(outputs.samples, 5.0, 500),
            0.7 * tone_magnitude(signal.samples, 5.0, 500),
        )

    @parameterized.parameters(50.0, 60.0, 100.0, 150.0)
    def test_stop_band_at_least_20_db(self, frequency):
        signal = tone(frequency)
        outputs = preprocess(signal)
        self.assertLessEqual(rms(outputs.samples), 0.1 * rms(signal.samples))

    @parameterized.parameters(1.0, 5.0, 10.0, 20.0)
    def test_pass_band_keeps_ecg_frequencies(self, frequency):
        signal = tone(frequency)
        outputs = preprocess(signal)
        self.assertGreaterEqual(
            rms(outputs.samples), 0.7 * rms(signal.samples)
        )

    def test_idempotent_in_passband(self):
        once = preprocess(tone(5.0))
        twice = preprocess(once)
        change = abs(rms(twice.samples) - rms(once.samples))
        self.assertLess(change, 0.01 * rms(once.samples))

    def test_short_signal(self):
        outputs = preprocess(EcgSignal(np.arange(10.0), 500))
        self.assertLen(outputs, 10)

    @parameterized.named_parameters(
        ("low_not_positive", 0.0, 40.0),
        ("low_above_high", 40.0, 0.5),
        ("high_above_nyquist", 0.5, 250.0),
    )
    def test_invalid_band(self, band_low, band_high):
        with self.assertRaises(ParameterError):
            preprocess(tone(5.0), band_low=band_low, band_high=band_high)

    def test_invalid_window(self):
        with self.assertRaises(ParameterError):
            preprocess(tone(5.0), ma_window=0)

    def test_empty_signal(self):
        with self.assertRaises(EmptyInputError):
            preprocess(EcgSignal(np.zeros(0), 500))
