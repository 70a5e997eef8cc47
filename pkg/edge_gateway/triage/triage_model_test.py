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
"""Tests for the triage model bundle."""

import os

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.synthetic import ARRHYTHMIA_SHAPE
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.triage.triage_model import TriageModel
from edge_gateway.triage.triage_model import bootstrap_triage_model
from edge_gateway.triage.triage_model import synthetic_triage_data
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError


class TriageModelTest(tf.test.TestCase, parameterized.TestCase):
    @parameterized.named_parameters(("svm", "svm"), ("nb", "nb"))
    def test_bootstrap_separates_rhythms(self, classifier):
        model = bootstrap_triage_model(seed=0, classifier=classifier)
        normal = synthesize_ecg(10.0, heart_rate=72.0, noise_std=0.02, seed=5)
        wide = synthesize_ecg(
            10.0,
            heart_rate=130.0,
            shape=ARRHYTHMIA_SHAPE,
            noise_std=0.02,
            seed=6,
        )
        self.assertEqual(
            model.classify(analyze_signal(normal.signal).beats), "normal"
        )
        self.assertEqual(
            model.classify(analyze_signal(wide.signal).beats), "abnormal"
        )

    def test_training_data_is_labelled_per_beat(self):
        beats, labels = synthetic_triage_data(seed=0)
        self.assertLen(beats, len(labels))
        self.assertEqual(set(labels.tolist()), {-1, 1})

    def test_no_beats_is_indeterminate(self):
        model = bootstrap_triage_model(seed=0)
        self.assertEqual(model.classify([]), "indeterminate")
        self.assertEqual(model.predict([]).shape, (0,))

    def test_fit_on_matrix(self):
        rng = np.random.default_rng(0)
        features = np.concatenate(
            [rng.normal(-3, 1, (40, 6)), rng.normal(3, 1, (40, 6))]
        )
        labels = np.repeat([-1, 1], 40)
        model = TriageModel.fit(features, labels)
        accuracy = np.mean(model.predict(features) == labels)
        self.assertGreaterEqual(accuracy, 0.95)

    def test_save_and_load(self):
        beats, labels = synthetic_triage_data(seed=1)
        model = TriageModel.fit(beats, labels, seed=1)
        path = os.path.join(self.get_temp_dir(), "triage.json")
        model.save(path)
        restored = TriageModel.load(path)
        self.assertAllEqual(restored.predict(beats), model.predict(beats))
        self.assertEqual(restored.get_config(), model.get_config())

    def test_load_garbage(self):
        path = os.path.join(self.get_temp_dir(), "triage.json")
        with open(path, "w") as f:
            f.write("not json")
        with self.assertRaises(FormatError):
            TriageModel.load(path)

    def test_unknown_classifier(self):
        with self.assertRaises(ParameterError):
            TriageModel.fit(np.ones((2, 6)), np.array([-1, 1]), "tree")
