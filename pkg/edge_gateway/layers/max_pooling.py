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
"""Non-overlapping 1D max pooling."""

import tensorflow as tf
from tensorflow import keras

from edge_gateway.utils.errors import ParameterError


def maxpool1d(inputs, pool_size):
    """Maximum over consecutive windows of `pool_size` steps.

    The time axis is cut into non-overlapping windows. A trailing partial
    window is pooled over the samples it actually holds, so the output
    length is `ceil(length / pool_size)`.

    Args:
        inputs: tensor of shape `[batch, length, channels]`, or a rank 1
            sequence which is pooled as a single channel.
        pool_size: int >= 1.
    """
    if pool_size < 1:
        raise ParameterError(
            f"`pool_size` must be >= 1. Received: pool_size={pool_size}"
        )
    inputs = tf.convert_to_tensor(inputs)
    if inputs.shape.rank == 1:
        return maxpool1d(inputs[tf.newaxis, :, tf.newaxis], pool_size)[0, :, 0]
    if pool_size == 1:
        return inputs

    shape = tf.shape(inputs)
    length = shape[1]
    num_windows = (length + pool_size - 1) // pool_size
    # Pad with the lowest representable value so padding never wins.
    padded = tf.pad(
        inputs,
        [[0, 0], [0, num_windows * pool_size - length], [0, 0]],
        constant_values=inputs.dtype.min,
    )
    windows = tf.reshape(
        padded, [shape[0], num_windows, pool_size, inputs.shape[-1]]
    )
    return tf.reduce_max(windows, axis=2)


@keras.utils.register_keras_serializable(package="edge_gateway")
class MaxPooling1D(keras.layers.Layer):
    """Keeps the strongest activation of each window of every feature map.

    Args:
        pool_size: int. Window length, windows do not overlap.
    """

    def __init__(self, pool_size=2, **kwargs):
        super().__init__(**kwargs)
        if pool_size < 1:
            raise ParameterError(
                f"`pool_size` must be >= 1. Received: pool_size={pool_size}"
            )
        self.pool_size = pool_size

    def call(self, inputs):
        return maxpool1d(inputs, self.pool_size)

    def compute_output_shape(self, input_shape):
        length = input_shape[1]
        if length is not None:
            length = -(-length // self.pool_size)
        return tf.TensorShape([input_shape[0], length, input_shape[-1]])

    def get_config(self):
        config = super().get_config()
        config.update({"pool_size": self.pool_size})
        return config
