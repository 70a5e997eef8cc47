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
"""Tests for Gaussian Naive Bayes."""

import numpy as np
import tensorflow as tf

from edge_gateway.triage.naive_bayes import GaussianNbModel
from edge_gateway.triage.naive_bayes import nb_log_likelihoods
from edge_gateway.triage.naive_bayes import nb_predict
from edge_gateway.triage.naive_bayes import nb_train
from edge_gateway.utils.errors import DataError
from edge_gateway.utils.errors import ShapeError


class NaiveBayesTest(tf.test.TestCase):
    def test_separated_clusters(self):
        rng = np.random.default_rng(0)
        features = np.concatenate(
            [rng.normal(-5.0, 1.0, (100, 2)), rng.normal(5.0, 1.0, (100, 2))]
        )
        labels = np.array([-1] * 100 + [1] * 100)
        model = nb_train(features, labels)
        test = np.concatenate(
            [rng.normal(-5.0, 1.0, (100, 2)), rng.normal(5.0, 1.0, (100, 2))]
        )
        predicted, _ = nb_predict(model, test)
        self.assertGreaterEqual(np.mean(predicted == labels), 0.99)

    def test_class_mean_wins(self):
        features = np.array([[0.0], [2.0], [10.0], [12.0]])
        labels = np.array([0, 0, 1, 1])
        model = nb_train(features, labels)
        label, log_likelihoods = nb_predict(model, [1.0])
        self.assertEqual(label, 0)
        self.assertEqual(log_likelihoods.shape, (2,))
        label, _ = nb_predict(model, [11.0])
        self.assertEqual(label, 1)

    def test_priors_sum_to_one(self):
        features = np.arange(10.0).reshape(5, 2)
        model = nb_train(features, np.array([1, 1, 1, -1, -1]))
        self.assertAllClose(np.exp(model.log_priors).sum(), 1.0)
        self.assertAllClose(np.exp(model.log_priors), [0.4, 0.6])

    def test_constant_feature(self):
        features = np.array([[1.0, 0.0], [1.0, 1.0], [1.0, 5.0], [1.0, 6.0]])
        model = nb_train(features, np.array([0, 0, 1, 1]))
        self.assertAllGreaterEqual(model.variances, 1e-9)
        label, log_likelihoods = nb_predict(model, [2.0, 0.5])
        self.assertTrue(np.all(np.isfinite(log_likelihoods)))
        self.assertEqual(label, 0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(1)
        model = nb_train(rng.normal(size=(20, 3)), np.repeat([0, 1], 10))
        x = rng.normal(size=(50, 3))
        log_likelihoods = nb_log_likelihoods(model, x)
        self.assertAllEqual(
            np.argmax(log_likelihoods, axis=-1),
            np.argmax(log_likelihoods + 123.0, axis=-1),
        )

    def test_single_class(self):
        with self.assertRaises(DataError):
            nb_train(np.ones((3, 2)), np.zeros(3))

    def test_dimension_mismatch(self):
        model = nb_train(np.arange(8.0).reshape(4, 2), np.array([0, 0, 1, 1]))
        with self.assertRaises(ShapeError):
            nb_predict(model, [1.0])

    def test_config_round_trip(self):
        model = nb_train(np.arange(8.0).reshape(4, 2), np.array([0, 0, 1, 1]))
        restored = GaussianNbModel.from_config(model.get_config())
        self.assertAllEqual(restored.means, model.means)
        self.assertAllEqual(restored.classes, model.classes)
