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
"""Batch normalization layer with moving population statistics."""

import tensorflow as tf
from tensorflow import keras

from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import StateError


def batchnorm_forward(
    inputs,
    gamma,
    beta,
    moving_mean=None,
    moving_variance=None,
    training=False,
    epsilon=1e-5,
):
    """Normalize `inputs` over every axis but the last one.

    In training mode the mean and (biased) variance are taken over the batch,
    the input is standardized with them and then scaled by `gamma` and
    shifted by `beta`. In inference mode the moving statistics are used
    instead, which makes the layer a fixed affine map.

    Raises:
        StateError: inference was requested without moving statistics.
    """
    inputs = tf.convert_to_tensor(inputs)
    if training:
        axes = list(range(inputs.shape.rank - 1))
        mean, variance = tf.nn.moments(inputs, axes=axes)
    else:
        if moving_mean is None or moving_variance is None:
            raise StateError(
                "Batch normalization in inference mode needs moving "
                "statistics. Train the layer first."
            )
        mean, variance = moving_mean, moving_variance
    return tf.nn.batch_normalization(
        inputs,
        tf.cast(mean, inputs.dtype),
        tf.cast(variance, inputs.dtype),
        offset=tf.cast(beta, inputs.dtype),
        scale=tf.cast(gamma, inputs.dtype),
        variance_epsilon=epsilon,
    )


@keras.utils.register_keras_serializable(package="edge_gateway")
class BatchNormalization(keras.layers.Layer):
    """Normalizes the last axis with batch statistics while training.

    Each training call standardizes its input with the batch mean and
    variance, then updates the moving statistics as
    `moving = momentum * moving + (1 - momentum) * batch`. Inference calls
    read the moving statistics. Running inference on a layer that never saw
    a training batch raises `StateError`.

    Args:
        momentum: float. Decay of the moving statistics.
        epsilon: float. Added to the variance to avoid division by zero.
        gamma_initializer: Initializer of the scale.
        beta_initializer: Initializer of the offset.
    """

    def __init__(
        self,
        momentum=0.9,
        epsilon=1e-5,
        gamma_initializer="ones",
        beta_initializer="zeros",
        **kwargs,
    ):
        super().__init__(**kwargs)
        if epsilon <= 0:
            raise ParameterError(
                f"`epsilon` must be positive. Received: epsilon={epsilon}"
            )
        if not 0.0 <= momentum < 1.0:
            raise ParameterError(
                f"`momentum` must be in [0, 1). Received: momentum={momentum}"
            )
        self.momentum = momentum
        self.epsilon = epsilon
        self.gamma_initializer = keras.initializers.get(gamma_initializer)
        self.beta_initializer = keras.initializers.get(beta_initializer)

    def build(self, input_shape):
        features = input_shape[-1]
        self.gamma = self.add_weight(
            name="gamma",
            shape=[features],
            initializer=self.gamma_initializer,
            trainable=True,
        )
        self.beta = self.add_weight(
            name="beta",
            shape=[features],
            initializer=self.beta_initializer,
            trainable=True,
        )
        self.moving_mean = self.add_weight(
            name="moving_mean",
            shape=[features],
            initializer="zeros",
            trainable=False,
        )
        self.moving_variance = self.add_weight(
            name="moving_variance",
            shape=[features],
            initializer="ones",
            trainable=False,
        )
        self.num_updates = self.add_weight(
            name="num_updates",
            shape=[],
            dtype=tf.int64,
            initializer="zeros",
            trainable=False,
        )
        super().build(input_shape)

    def call(self, inputs, training=None):
        if training:
            axes = list(range(inputs.shape.rank - 1))
            mean, variance = tf.nn.moments(inputs, axes=axes)
            decay = tf.cast(self.momentum, self.moving_mean.dtype)
            self.moving_mean.assign(
                decay * self.moving_mean
                + (1.0 - decay) * tf.cast(mean, self.moving_mean.dtype)
            )
            self.moving_variance.assign(
                decay * self.moving_variance
                + (1.0 - decay) * tf.cast(variance, self.moving_variance.dtype)
            )
            self.num_updates.assign_add(1)
            return tf.nn.batch_normalization(
                inputs,
                mean,
                variance,
                offset=tf.cast(self.beta, inputs.dtype),
                scale=tf.cast(self.gamma, inputs.dtype),
                variance_epsilon=self.epsilon,
            )

        if tf.executing_eagerly():
            if int(self.num_updates.numpy()) == 0:
                raise StateError(
                    f"Layer `{self.name}` has no moving statistics yet. "
                    "Call it with `training=True` before inference."
                )
        else:
            tf.debugging.assert_positive(
                self.num_updates,
                message=f"Layer `{self.name}` has no moving statistics yet.",
            )
        return batchnorm_forward(
            inputs,
            self.gamma,
            self.beta,
            self.moving_mean,
            self.moving_variance,
            training=False,
            epsilon=self.epsilon,
        )

    def get_config(self):
        config = super().get_config()
        config.update(
            {
                "momentum": self.momentum,
                "epsilon": self.epsilon,
                "gamma_initializer": keras.initializers.serialize(
                    self.gamma_initializer
                ),
                "beta_initializer": keras.initializers.serialize(
                    self.beta_initializer
                ),
            }
        )
        return config
