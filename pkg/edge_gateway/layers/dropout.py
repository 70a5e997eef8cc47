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
"""Inverted dropout with stateless, seeded masks."""

import tensorflow as tf
from tensorflow import keras

from edge_gateway.utils.errors import ParameterError


def _check_retain_probability(retain_probability):
    if not 0.0 < retain_probability <= 1.0:
        raise ParameterError(
            "`retain_probability` must be in (0, 1]. "
            f"Received: retain_probability={retain_probability}"
        )


def _apply_mask(inputs, retain_probability, seed):
    noise = tf.random.stateless_uniform(
        tf.shape(inputs), seed=seed, dtype=inputs.dtype
    )
    keep = noise < retain_probability
    scaled = inputs / tf.cast(retain_probability, inputs.dtype)
    return tf.where(keep, scaled, tf.zeros_like(inputs))


def dropout(inputs, retain_probability, training=False, seed=0):
    """Keep each unit with probability `retain_probability`.

    Kept units are scaled by `1 / retain_probability`, so inference is the
    identity. The mask is a pure function of `seed` and the input shape.
    """
    _check_retain_probability(retain_probability)
    inputs = tf.convert_to_tensor(inputs)
    if not training or retain_probability == 1.0:
        return inputs
    seed = tf.constant([seed, 0], dtype=tf.int64)
    return _apply_mask(inputs, retain_probability, seed)


@keras.utils.register_keras_serializable(package="edge_gateway")
class Dropout(keras.layers.Layer):
    """Inverted dropout driven by a seed and a call counter.

    Each training call draws a fresh mask from `(seed, step)` where `step`
    counts training calls, so a training run is reproducible from its seed
    and a restored layer continues the same mask sequence.

    Args:
        retain_probability: float in (0, 1]. Chance that a unit is kept.
        seed: int. Seed of the mask stream.
    """

    def __init__(self, retain_probability, seed=0, **kwargs):
        super().__init__(**kwargs)
        _check_retain_probability(retain_probability)
        self.retain_probability = retain_probability
        self.seed = seed

    def build(self, input_shape):
        self.step = self.add_weight(
            name="step",
            shape=[],
            dtype=tf.int64,
            initializer="zeros",
            trainable=False,
        )
        super().build(input_shape)

    def call(self, inputs, training=None):
        if not training or self.retain_probability == 1.0:
            return inputs
        seed = tf.stack(
            [
                tf.constant(self.seed, dtype=tf.int64),
                tf.convert_to_tensor(self.step),
            ]
        )
        self.step.assign_add(1)
        return _apply_mask(inputs, self.retain_probability, seed)

    def compute_output_shape(self, input_shape):
        return input_shape

    def get_config(self):
        config = super().get_config()
        config.update(
            {
                "retain_probability": self.retain_probability,
                "seed": self.seed,
            }
        )
        return config
