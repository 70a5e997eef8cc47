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
"""Finite-difference verification of tape gradients."""

import numpy as np
import tensorflow as tf

from edge_gateway.utils.errors import ParameterError


def gradient_check(loss_fn, variables, h=1e-5):
    """Compare `tf.GradientTape` gradients with central differences.

    `loss_fn` is called with no arguments and must be a deterministic
    function of `variables`. Each scalar entry is nudged by `+h` and `-h`
    in turn and restored afterwards.

    Returns:
        The largest relative error over all variables, measured as
        `|analytic - numeric| / max(|analytic| + |numeric|, 1e-12)` on the
        flattened gradient of each variable.
    """
    if h <= 0:
        raise ParameterError(f"`h` must be positive. Received: h={h}")
    with tf.GradientTape() as tape:
        loss = loss_fn()
    analytic = tape.gradient(loss, variables)

    worst = 0.0
    for variable, gradient in zip(variables, analytic):
        original = variable.numpy()
        if gradient is None:
            gradient = np.zeros_like(original)
        else:
            gradient = tf.convert_to_tensor(gradient).numpy()
        numeric = np.zeros_like(original, dtype=np.float64)
        flat = original.reshape(-1)
        for index in range(flat.size):
            nudged = flat.copy()
            nudged[index] += h
            variable.assign(nudged.reshape(original.shape))
            upper = float(loss_fn())
            nudged[index] -= 2 * h
            variable.assign(nudged.reshape(original.shape))
            lower = float(loss_fn())
            numeric.reshape(-1)[index] = (upper - lower) / (2 * h)
        variable.assign(original)

        difference = np.linalg.norm(gradient - numeric)
        scale = max(np.linalg.norm(gradient) + np.linalg.norm(numeric), 1e-12)
        worst = max(worst, difference / scale)
    return worst
