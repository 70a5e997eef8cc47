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
"""Gaussian Naive Bayes classifier."""

import dataclasses

import numpy as np

from edge_gateway.triage.linear_svm import check_training_data
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError

VARIANCE_FLOOR = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class GaussianNbModel:
    """Per-class Gaussian feature likelihoods.

    `means` and `variances` have shape `[num_classes, num_features]` and are
    ordered like `classes`.
    """

    classes: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_priors: np.ndarray

    @property
    def num_features(self):
        return int(self.means.shape[1])

    def get_config(self):
        return {
            "classes": self.classes.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_priors": self.log_priors.tolist(),
        }

    @classmethod
    def from_config(cls, config):
        return cls(
            classes=np.asarray(config["classes"]),
            means=np.asarray(config["means"], dtype="float64"),
            variances=np.asarray(config["variances"], dtype="float64"),
            log_priors=np.asarray(config["log_priors"], dtype="float64"),
        )


def nb_train(features, labels, variance_floor=VARIANCE_FLOOR):
    """Fit per-class means, floored variances and log-priors."""
    if variance_floor <= 0:
        raise ParameterError(
            "`variance_floor` must be > 0. "
            f"Received: variance_floor={variance_floor}"
        )
    features, labels = check_training_data(features, labels)
    classes, counts = np.unique(labels, return_counts=True)
    means = np.stack([features[labels == c].mean(axis=0) for c in classes])
    variances = np.stack([features[labels == c].var(axis=0) for c in classes])
    return GaussianNbModel(
        classes=classes,
        means=means,
        variances=np.maximum(variances, variance_floor),
        log_priors=np.log(counts / counts.sum()),
    )


def nb_log_likelihoods(model, features):
    """Joint log-likelihood `log p(c) + log p(x | c)` per class."""
    features = np.asarray(features, dtype="float64")
    if features.ndim not in (1, 2) or features.shape[-1] != model.num_features:
        raise ShapeError(
            f"Expected feature vectors of size {model.num_features}. "
            f"Received: shape={features.shape}"
        )
    x = features[..., np.newaxis, :]
    log_pdf = -0.5 * (
        np.log(2.0 * np.pi * model.variances)
        + (x - model.means) ** 2 / model.variances
    )
    return model.log_priors + log_pdf.sum(axis=-1)


def nb_predict(model, features):
    """Most probable class and the per-class log-likelihoods.

    Ties go to the class listed first in `model.classes`.
    """
    log_likelihoods = nb_log_likelihoods(model, features)
    labels = model.classes[np.argmax(log_likelihoods, axis=-1)]
    if np.ndim(features) == 1:
        return labels.item(), log_likelihoods
    return labels, log_likelihoods
