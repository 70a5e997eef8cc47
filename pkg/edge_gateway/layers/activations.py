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
"""Activation functions used by the ECG classifier."""

import numpy as np
import tensorflow as tf

from edge_gateway.utils.errors import ParameterError

LEAKY_SLOPE = 0.01


def linear(x):
    return tf.convert_to_tensor(x)


def relu(x):
    """`x` where positive, zero otherwise."""
    x = tf.convert_to_tensor(x)
    return tf.maximum(x, tf.zeros_like(x))


def leaky_relu(x):
    """`x` where positive, `0.01 * x` otherwise."""
    x = tf.convert_to_tensor(x)
    return tf.where(x > 0, x, LEAKY_SLOPE * x)


def softmax(logits):
    """Softmax over the last axis, shifted by the row maximum."""
    logits = tf.convert_to_tensor(logits)
    shifted = logits - tf.reduce_max(logits, axis=-1, keepdims=True)
    exponentials = tf.exp(shifted)
    return exponentials / tf.reduce_sum(exponentials, axis=-1, keepdims=True)


def softmax_argmax(logits):
    """Index of the most probable class.

    Ties resolve to the lowest index. A single logit vector gives an `int`,
    a batch of vectors gives an integer array.
    """
    probabilities = softmax(tf.convert_to_tensor(logits, dtype=tf.float64))
    indices = np.argmax(probabilities.numpy(), axis=-1)
    if np.ndim(indices) == 0:
        return int(indices)
    return indices


ACTIVATIONS = {
    "linear": linear,
    "relu": relu,
    "leaky_relu": leaky_relu,
    "softmax": softmax,
}


def get(identifier):
    """Resolve an activation name, `None` meaning linear."""
    if identifier is None:
        return linear
    if callable(identifier):
        return identifier
    if identifier not in ACTIVATIONS:
        raise ParameterError(
            f"`activation` must be one of {sorted(ACTIVATIONS)}. "
            f"Received: activation={identifier}"
        )
    return ACTIVATIONS[identifier]
