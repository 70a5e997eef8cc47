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
"""Tests for 1D max pooling."""

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from edge_gateway.layers import max_pooling
from edge_gateway.utils.errors import ParameterError


class MaxPool1DTest(tf.test.TestCase, parameterized.TestCase):
    def test_pool_two(self):
        outputs = max_pooling.maxpool1d([1.0, 3.0, 2.0, 5.0], 2)
        self.assertAllEqual(outputs, [3.0, 5.0])

    def test_pool_one_is_identity(self):
        inputs = np.random.default_rng(0).normal(size=(2, 7, 3))
        self.assertAllEqual(max_pooling.maxpool1d(inputs, 1), inputs)

    def test_matches_windowed_max(self):
        inputs = np.random.default_rng(1).normal(size=(1, 100, 1))
        outputs = max_pooling.maxpool1d(inputs, 2)
        expected = inputs.reshape(1, 50, 2, 1).max(axis=2)
        self.assertAllEqual(outputs, expected)

    def test_partial_trailing_window(self):
        outputs = max_pooling.maxpool1d([1.0, 2.0, 3.0, 4.0, 9.0], 2)
        self.assertAllEqual(outputs, [2.0, 4.0, 9.0])
        outputs = max_pooling.maxpool1d([-5.0, -3.0, -7.0], 2)
        self.assertAllEqual(outputs, [-3.0, -7.0])

    @parameterized.parameters((10, 3), (11, 2), (187, 2), (5, 7))
    def test_output_length(self, length, pool_size):
        outputs = max_pooling.maxpool1d(np.zeros((2, length, 4)), pool_size)
        self.assertEqual(outputs.shape, (2, -(-length // pool_size), 4))

    def test_invalid_pool_size(self):
        with self.assertRaises(ParameterError):
            max_pooling.maxpool1d([1.0, 2.0], 0)


class MaxPooling1DLayerTest(tf.test.TestCase):
    def test_layer_shape(self):
        layer = max_pooling.MaxPooling1D(pool_size=2)
        outputs = layer(tf.zeros((3, 187, 64)))
        self.assertEqual(outputs.shape, (3, 94, 64))
        self.assertEqual(
            layer.compute_output_shape((3, 187, 64)), outputs.shape
        )

    def test_get_config_and_from_config(self):
        layer = max_pooling.MaxPooling1D(pool_size=3)
        config = layer.get_config()
        restored = max_pooling.MaxPooling1D.from_config(config)
        self.assertEqual(restored.get_config(), config)
