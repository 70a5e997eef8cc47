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
"""Tests for the 1D convolution layer."""

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from edge_gateway.layers import conv1d
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError


def sliding_window_conv(inputs, kernel, bias, stride):
    batch, length, channels = inputs.shape
    field, _, filters = kernel.shape
    positions = (length - field) // stride + 1
    outputs = np.zeros((batch, positions, filters))
    for b in range(batch):
        for r in range(positions):
            for f in range(filters):
                total = bias[f]
                for q in range(field):
                    for n in range(channels):
                        total += kernel[q, n, f] * inputs[b, r * stride + q, n]
                outputs[b, r, f] = total
    return outputs


class Conv1DForwardTest(tf.test.TestCase, parameterized.TestCase):
    def test_hand_computed(self):
        inputs = np.array([[[1.0], [2.0], [3.0]]])
        kernel = np.ones((2, 1, 1))
        outputs = conv1d.conv1d_forward(inputs, kernel, np.zeros(1))
        self.assertAllClose(outputs, [[[3.0], [5.0]]])

    def test_identity_kernel(self):
        inputs = np.random.default_rng(0).normal(size=(2, 11, 1))
        outputs = conv1d.conv1d_forward(inputs, np.ones((1, 1, 1)))
        self.assertAllClose(outputs, inputs)

    @parameterized.parameters(1, 2)
    def test_matches_sliding_window(self, stride):
        rng = np.random.default_rng(1)
        inputs = rng.normal(size=(1, 16, 2))
        kernel = rng.normal(size=(3, 2, 4))
        bias = rng.normal(size=4)
        outputs = conv1d.conv1d_forward(inputs, kernel, bias, stride=stride)
        expected = sliding_window_conv(inputs, kernel, bias, stride)
        self.assertAllClose(outputs, expected, atol=1e-12, rtol=0)

    def test_matches_sliding_window_on_random_shapes(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            length = int(rng.integers(4, 20))
            field = int(rng.integers(1, length + 1))
            channels = int(rng.integers(1, 4))
            filters = int(rng.integers(1, 4))
            stride = int(rng.integers(1, 4))
            inputs = rng.normal(size=(2, length, channels))
            kernel = rng.normal(size=(field, channels, filters))
            bias = rng.normal(size=filters)
            outputs = conv1d.conv1d_forward(
                inputs, kernel, bias, stride=stride
            )
            expected = sliding_window_conv(inputs, kernel, bias, stride)
            self.assertAllClose(outputs, expected, atol=1e-12, rtol=0)

    def test_channel_mismatch(self):
        with self.assertRaises(ShapeError):
            conv1d.conv1d_forward(np.zeros((1, 8, 2)), np.zeros((2, 3, 1)))

    def test_invalid_padding(self):
        with self.assertRaises(ParameterError):
            conv1d.conv1d_forward(
                np.zeros((1, 8, 1)), np.zeros((2, 1, 1)), padding="valid"
            )


class ConvOutputSizeTest(tf.test.TestCase, parameterized.TestCase):
    def test_literal_formula(self):
        self.assertEqual(conv1d.literal_conv_output_size(187, 2, 1), 188)

    @parameterized.parameters(
        (187, 2, 1),
        (187, 2, 2),
        (10, 3, 3),
        (64, 5, 4),
        (9, 9, 1),
    )
    def test_literal_formula_floors(self, length, kernel_size, stride):
        self.assertEqual(
            conv1d.literal_conv_output_size(length, kernel_size, stride),
            (length - (kernel_size - 1) + 2) // stride,
        )

    def test_same_padding_keeps_length(self):
        self.assertEqual(conv1d.conv_output_size(187, 2, 1, "same"), 187)

    def test_no_padding(self):
        self.assertEqual(conv1d.conv_output_size(10, 2, 1, "none"), 9)
        self.assertEqual(conv1d.conv_output_size(10, 3, 2, "none"), 4)

    def test_kernel_longer_than_input(self):
        with self.assertRaises(ParameterError):
            conv1d.conv_output_size(3, 4, 1, "none")


class Conv1DLayerTest(tf.test.TestCase, parameterized.TestCase):
    @parameterized.named_parameters(
        ("same", "same", 187),
        ("none", "none", 186),
    )
    def test_output_shape(self, padding, expected_length):
        layer = conv1d.Conv1D(
            filters=64, kernel_size=2, padding=padding, dtype="float64"
        )
        outputs = layer(tf.zeros((3, 187, 1), dtype="float64"))
        self.assertEqual(outputs.shape, (3, expected_length, 64))
        self.assertEqual(
            layer.compute_output_shape((3, 187, 1)), outputs.shape
        )

    def test_weight_count(self):
        layer = conv1d.Conv1D(filters=4, kernel_size=3)
        layer(tf.zeros((1, 10, 2)))
        self.assertEqual(layer.kernel.shape, (3, 2, 4))
        self.assertEqual(layer.bias.shape, (4,))

    def test_initializer_range(self):
        layer = conv1d.Conv1D(filters=64, kernel_size=2)
        layer(tf.zeros((1, 10, 1)))
        limit = np.sqrt(6.0 / (2 * 1 + 2 * 64))
        self.assertLessEqual(np.max(np.abs(layer.kernel.numpy())), limit)

    def test_relu_activation(self):
        layer = conv1d.Conv1D(
            filters=1,
            kernel_size=1,
            activation="relu",
            kernel_initializer="ones",
        )
        outputs = layer(tf.constant([[[-1.0], [2.0]]]))
        self.assertAllClose(outputs, [[[0.0], [2.0]]])

    def test_invalid_args(self):
        with self.assertRaises(ParameterError):
            conv1d.Conv1D(filters=0, kernel_size=2)
        with self.assertRaises(ParameterError):
            conv1d.Conv1D(filters=2, kernel_size=2, padding="causal")
        with self.assertRaises(ParameterError):
            conv1d.Conv1D(filters=2, kernel_size=2, activation="swish")

    def test_get_config_and_from_config(self):
        layer = conv1d.Conv1D(
            filters=8, kernel_size=3, strides=2, activation="relu"
        )
        config = layer.get_config()
        restored = conv1d.Conv1D.from_config(config)
        self.assertEqual(restored.get_config(), config)
