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
"""Tests for the ECG signal container and file format."""

import os

import numpy as np
import tensorflow as tf

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.ecg_signal import read_signal_csv
from edge_gateway.dsp.ecg_signal import write_signal_csv
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError


class EcgSignalTest(tf.test.TestCase):
    def _write(self, text):
        path = os.path.join(self.get_temp_dir(), "signal.csv")
        with open(path, "w") as f:
            f.write(text)
        return path

    def test_invalid_sampling_rate(self):
        with self.assertRaises(ParameterError):
            EcgSignal(np.zeros(4), 0)
        with self.assertRaises(ParameterError):
            EcgSignal(np.zeros(4), 2.5)

    def test_duration(self):
        signal = EcgSignal(np.zeros(2500), 500)
        self.assertEqual(signal.duration, 5.0)
        self.assertLen(signal, 2500)

    def test_write_and_read(self):
        signal = EcgSignal(np.array([0.1, -0.25, 1.2]), 360)
        path = os.path.join(self.get_temp_dir(), "signal.csv")
        write_signal_csv(path, signal)
        with open(path) as f:
            self.assertEqual(f.readline().strip(), "fs=360")
        restored = read_signal_csv(path)
        self.assertEqual(restored.sampling_rate, 360)
        self.assertAllEqual(restored.samples, signal.samples)

    def test_header_only_is_empty_signal(self):
        signal = read_signal_csv(self._write("fs=500\n"))
        self.assertLen(signal, 0)

    def test_missing_header(self):
        with self.assertRaisesRegex(FormatError, "fs=<Hz>"):
            read_signal_csv(self._write("0.1\n0.2\n"))

    def test_bad_sample_names_line(self):
        with self.assertRaisesRegex(FormatError, "Line 3"):
            read_signal_csv(self._write("fs=500\n0.1\nabc\n"))
