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
"""1D convolution layer based on `keras.layers.Layer`."""

import math

import tensorflow as tf
from tensorflow import keras

from edge_gateway.layers import activations
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError

PADDING_MODES = ("none", "same")


def _check_padding(padding):
    if padding not in PADDING_MODES:
        raise ParameterError(
            f"`padding` must be one of {PADDING_MODES}. "
            f"Received: padding={padding}"
        )


def conv_output_size(length, kernel_size, stride=1, padding="none"):
    """Number of output positions of a 1D convolution.

    `"none"` counts the valid windows, `floor((M - K) / S) + 1`. `"same"`
    pads the input so that `ceil(M / S)` positions remain, which is `M` at
    stride 1.
    """
    _check_padding(padding)
    if kernel_size < 1 or stride < 1:
        raise ParameterError(
            "`kernel_size` and `stride` must be >= 1. Received: "
            f"kernel_size={kernel_size}, stride={stride}"
        )
    if padding == "same":
        return math.ceil(length / stride)
    if kernel_size > length:
        raise ParameterError(
            f"`kernel_size` must not exceed the input length without padding. "
            f"Received: kernel_size={kernel_size}, length={length}"
        )
    return (length - kernel_size) // stride + 1


def literal_conv_output_size(length, kernel_size, stride=1):
    """Output size written as `(M - (K - 1) + 2) / S`, floored.

    This form over-counts by one at stride 1 compared with `"same"` padding
    (188 instead of 187 for `M=187, K=2`). Layer shapes use
    `conv_output_size`.
    """
    if stride < 1:
        raise ParameterError(f"`stride` must be >= 1. Received: {stride}")
    return (length - (kernel_size - 1) + 2) // stride


def conv1d_forward(inputs, kernel, bias=None, stride=1, padding="none"):
    """Pre-activation 1D convolution.

    Each output unit is the sum over the receptive field and the input
    channels of `kernel[q, n, f] * inputs[b, r * stride + q, n]`, plus the
    filter bias.

    Args:
        inputs: float tensor of shape `[batch, length, channels]`.
        kernel: float tensor of shape `[receptive_field, channels, filters]`.
        bias: optional float tensor of shape `[filters]`.
        stride: int.
        padding: `"none"` or `"same"`.

    Returns:
        A tensor of shape `[batch, output_length, filters]`.
    """
    _check_padding(padding)
    inputs = tf.convert_to_tensor(inputs)
    kernel = tf.convert_to_tensor(kernel, dtype=inputs.dtype)
    if inputs.shape.rank != 3 or kernel.shape.rank != 3:
        raise ShapeError(
            "`inputs` must be rank 3 `[batch, length, channels]` and "
            "`kernel` rank 3 `[receptive_field, channels, filters]`. "
            f"Received: inputs.shape={inputs.shape}, "
            f"kernel.shape={kernel.shape}"
        )
    if inputs.shape[-1] is not None and inputs.shape[-1] != kernel.shape[1]:
        raise ShapeError(
            "Input channels must match the kernel. Received: "
            f"inputs.shape={inputs.shape}, kernel.shape={kernel.shape}"
        )
    outputs = tf.nn.conv1d(
        inputs,
        kernel,
        stride=stride,
        padding="SAME" if padding == "same" else "VALID",
    )
    if bias is not None:
        outputs = outputs + tf.convert_to_tensor(bias, dtype=outputs.dtype)
    return outputs


@keras.utils.register_keras_serializable(package="edge_gateway")
class Conv1D(keras.layers.Layer):
    """Temporal convolution with a weight-shared receptive field.

    Args:
        filters: int. Number of output filters.
        kernel_size: int. Receptive field length.
        strides: int. Shift between successive windows.
        padding: string. `"same"` keeps the length at stride 1, `"none"`
            keeps only full windows.
        activation: string. Activation applied after the bias, `None` for
            linear.
        kernel_initializer: Initializer for the kernel. Defaults to
            `"glorot_uniform"`, i.e. uniform in `+-sqrt(6 / (fan_in +
            fan_out))`.
        bias_initializer: Initializer for the bias.

    Examples:
    ```python
    layer = edge_gateway.layers.Conv1D(filters=64, kernel_size=2)
    outputs = layer(tf.zeros((8, 187, 1)))  # Shape [8, 187, 64].
    ```
    """

    def __init__(
        self,
        filters,
        kernel_size,
        strides=1,
        padding="same",
        activation=None,
        kernel_initializer="glorot_uniform",
        bias_initializer="zeros",
        **kwargs,
    ):
        super().__init__(**kwargs)
        _check_padding(padding)
        if filters < 1 or kernel_size < 1 or strides < 1:
            raise ParameterError(
                "`filters`, `kernel_size` and `strides` must be >= 1. "
                f"Received: filters={filters}, kernel_size={kernel_size}, "
                f"strides={strides}"
            )
        self.filters = filters
        self.kernel_size = kernel_size
        self.strides = strides
        self.padding = padding
        activations.get(activation)
        self.activation = activation
        self.kernel_initializer = keras.initializers.get(kernel_initializer)
        self.bias_initializer = keras.initializers.get(bias_initializer)

    def build(self, input_shape):
        channels = input_shape[-1]
        self.kernel = self.add_weight(
            name="kernel",
            shape=[self.kernel_size, channels, self.filters],
            initializer=self.kernel_initializer,
            trainable=True,
        )
        self.bias = self.add_weight(
            name="bias",
            shape=[self.filters],
            initializer=self.bias_initializer,
            trainable=True,
        )
        super().build(input_shape)

    def call(self, inputs):
        outputs = conv1d_forward(
            inputs,
            self.kernel,
            self.bias,
            stride=self.strides,
            padding=self.padding,
        )
        return activations.get(self.activation)(outputs)

    def compute_output_shape(self, input_shape):
        length = input_shape[1]
        if length is not None:
            length = conv_output_size(
                length, self.kernel_size, self.strides, self.padding
            )
        return tf.TensorShape([input_shape[0], length, self.filters])

    def get_config(self):
        config = super().get_config()
        config.update(
            {
                "filters": self.filters,
                "kernel_size": self.kernel_size,
                "strides": self.strides,
                "padding": self.padding,
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
