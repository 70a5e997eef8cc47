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
"""Fully-connected layer."""

import tensorflow as tf
from tensorflow import keras

from edge_gateway.layers import activations
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError


def dense_forward(inputs, kernel, bias=None, activation=None):
    """Computes `activation(inputs @ kernel + bias)`.

    Args:
        inputs: tensor whose last axis has the kernel's input width.
        kernel: tensor of shape `[input_width, units]`.
        bias: optional tensor of shape `[units]`.
        activation: activation name or callable, `None` for linear.
    """
    inputs = tf.convert_to_tensor(inputs)
    kernel = tf.convert_to_tensor(kernel, dtype=inputs.dtype)
    if kernel.shape.rank != 2 or inputs.shape[-1] != kernel.shape[0]:
        raise ShapeError(
            "`inputs` last axis must match the kernel input width. "
            f"Received: inputs.shape={inputs.shape}, "
            f"kernel.shape={kernel.shape}"
        )
    if inputs.shape.rank == 2:
        outputs = tf.matmul(inputs, kernel)
    else:
        outputs = tf.tensordot(inputs, kernel, axes=[[-1], [0]])
    if bias is not None:
        outputs = outputs + tf.convert_to_tensor(bias, dtype=outputs.dtype)
    return activations.get(activation)(outputs)


@keras.utils.register_keras_serializable(package="edge_gateway")
class Dense(keras.layers.Layer):
    """Densely connected layer, `activation(inputs @ kernel + bias)`.

    Args:
        units: int. Output width.
        activation: string. One of `"linear"`, `"relu"`, `"leaky_relu"`,
            `"softmax"`, or `None` for linear.
        kernel_initializer: Initializer for the kernel.
        bias_initializer: Initializer for the bias.
    """

    def __init__(
        self,
        units,
        activation=None,
        kernel_initializer="glorot_uniform",
        bias_initializer="zeros",
        **kwargs,
    ):
        super().__init__(**kwargs)
        if units < 1:
            raise ParameterError(f"`units` must be >= 1. Received: {units}")
        # Validate eagerly so bad names fail at construction.
        activations.get(activation)
        self.units = units
        self.activation = activation
        self.kernel_initializer = keras.initializers.get(kernel_initializer)
        self.bias_initializer = keras.initializers.get(bias_initializer)

    def build(self, input_shape):
        self.kernel = self.add_weight(
            name="kernel",
            shape=[input_shape[-1], self.units],
            initializer=self.kernel_initializer,
            trainable=True,
        )
        self.bias = self.add_weight(
            name="bias",
            shape=[self.units],
            initializer=self.bias_initializer,
            trainable=True,
        )
        super().build(input_shape)

    def call(self, inputs):
        return dense_forward(inputs, self.kernel, self.bias, self.activation)

    def compute_output_shape(self, input_shape):
        return tf.TensorShape(input_shape[:-1]).concatenate([self.units])

    def get_config(self):
        config = super().get_config()
        config.update(
            {
                "units": self.units,
                "activation": self.activation,
                "kernel_initializer": keras.initializers.serialize(
                    self.kernel_initializer
                ),
                "bias_initializer": keras.initializers.serialize(
                    self.bias_initializer
                ),
            }
        )
        return config
