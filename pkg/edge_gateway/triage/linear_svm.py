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
"""Linear SVM trained with the Pegasos hinge-loss subgradient method."""

import dataclasses

import numpy as np
from absl import logging

from edge_gateway.utils.errors import DataError
from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError

NORMAL = -1
ABNORMAL = 1


@dataclasses.dataclass(frozen=True, eq=False)
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    regularization: float

    @property
    def num_features(self):
        return int(self.weights.shape[0])

    def get_config(self):
        return {
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "regularization": float(self.regularization),
        }

    @classmethod
    def from_config(cls, config):
        return cls(
            weights=np.asarray(config["weights"], dtype="float64"),
            bias=float(config["bias"]),
            regularization=float(config["regularization"]),
        )


def check_training_data(features, labels):
    """Validate a training set and return it as float features and labels."""
    features = np.asarray(features, dtype="float64")
    labels = np.asarray(labels)
    if features.ndim != 2:
        raise ShapeError(
            "`features` must have shape `[num_examples, num_features]`. "
            f"Received: shape={features.shape}"
        )
    if features.shape[0] == 0:
        raise EmptyInputError("Cannot train on an empty feature matrix.")
    if labels.shape != (features.shape[0],):
        raise ShapeError(
            "`labels` must hold one entry per row of `features`. "
            f"Received: labels.shape={labels.shape}, "
            f"features.shape={features.shape}"
        )
    if not np.all(np.isfinite(features)):
        raise ParameterError("`features` must be finite.")
    if len(np.unique(labels)) < 2:
        raise DataError(
            "Training needs at least one example of each class. "
            f"Received only label {labels[0]}."
        )
    return features, labels


def svm_train(features, labels, regularization=0.01, epochs=50, seed=0):
    """Fit a linear SVM with Pegasos.

    Each step visits one example, in a fresh seeded permutation per epoch,
    with step size `1 / (regularization * t)`. The bias is learned as the
    weight of a constant feature.

    Args:
        features: float array of shape `[num_examples, num_features]`.
        labels: int array of `-1` / `+1` labels.
        regularization: float. The regularization strength, must be > 0.
        epochs: int. Number of passes over the data.
        seed: int. Seed of the visiting order.

    Returns:
        A `LinearSvmModel`.
    """
    if regularization <= 0:
        raise ParameterError(
            "`regularization` must be > 0. "
            f"Received: regularization={regularization}"
        )
    if epochs < 1:
        raise ParameterError(
            f"`epochs` must be >= 1. Received: epochs={epochs}"
        )
    features, labels = check_training_data(features, labels)
    if not np.all(np.isin(labels, (NORMAL, ABNORMAL))):
        raise ParameterError(
            "`labels` must be -1 or +1. "
            f"Received: labels={sorted(set(labels.tolist()))}"
        )
    labels = labels.astype("float64")

    augmented = np.concatenate(
        [features, np.ones((features.shape[0], 1))], axis=1
    )
    w = np.zeros((augmented.shape[1],), dtype="float64")
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(augmented.shape[0]):
            t += 1
            step = 1.0 / (regularization * t)
            x, y = augmented[i], labels[i]
            violated = y * np.dot(w, x) < 1.0
            w *= 1.0 - step * regularization
            if violated:
                w += step * y * x
    logging.vlog(1, "Trained linear SVM over %d steps.", t)
    return LinearSvmModel(
        weights=w[:-1].copy(), bias=float(w[-1]), regularization=regularization
    )


def svm_predict(model, features):
    """Predict `-1` / `+1` and the margin `w . x + b`.

    `sign(0)` is `+1`. A single feature vector gives an int and a float, a
    matrix gives arrays of both.
    """
    features = np.asarray(features, dtype="float64")
    if features.ndim not in (1, 2) or features.shape[-1] != model.num_features:
        raise ShapeError(
            f"Expected feature vectors of size {model.num_features}. "
            f"Received: shape={features.shape}"
        )
    margins = features @ model.weights + model.bias
    labels = np.where(margins >= 0, ABNORMAL, NORMAL)
    if features.ndim == 1:
        return int(labels), float(margins)
    return labels, margins
