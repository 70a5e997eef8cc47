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
"""Z-score scaling of beat feature vectors."""

import dataclasses

import numpy as np

from edge_gateway.dsp.features import FEATURE_COLUMNS
from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import ShapeError
from edge_gateway.utils.errors import StateError


def features_to_matrix(beats):
    """Stack `BeatFeatures` into a `[num_beats, 6]` array, `nan` if absent."""
    if not beats:
        return np.zeros((0, len(FEATURE_COLUMNS)), dtype="float64")
    return np.stack([beat.as_array() for beat in beats])


@dataclasses.dataclass(eq=False)
class FeatureScaler:
    """Standardize features with training statistics.

    Absent (`nan`) values are imputed with the training mean, so they map
    to 0 after scaling. Constant columns keep unit scale.
    """

    mean: np.ndarray = None
    scale: np.ndarray = None

    @property
    def fitted(self):
        return self.mean is not None

    def fit(self, matrix):
        matrix = np.asarray(matrix, dtype="float64")
        if matrix.ndim != 2:
            raise ShapeError(
                "`matrix` must have shape `[num_examples, num_features]`. "
                f"Received: shape={matrix.shape}"
            )
        if matrix.shape[0] == 0:
            raise EmptyInputError("Cannot fit a scaler on zero examples.")
        present = np.isfinite(matrix)
        counts = present.sum(axis=0)
        filled = np.where(present, matrix, 0.0)
        mean = filled.sum(axis=0) / np.maximum(counts, 1)
        centered = np.where(present, matrix - mean, 0.0)
        std = np.sqrt((centered**2).sum(axis=0) / np.maximum(counts, 1))
        self.mean = mean
        self.scale = np.where(std > 0, std, 1.0)
        return self

    def transform(self, matrix):
        if not self.fitted:
            raise StateError("`FeatureScaler.fit()` must be called first.")
        matrix = np.asarray(matrix, dtype="float64")
        if matrix.ndim != 2 or matrix.shape[1] != self.mean.shape[0]:
            raise ShapeError(
                f"Expected rows of {self.mean.shape[0]} features. "
                f"Received: shape={matrix.shape}"
            )
        matrix = np.where(np.isfinite(matrix), matrix, self.mean)
        return (matrix - self.mean) / self.scale

    def fit_transform(self, matrix):
        return self.fit(matrix).transform(matrix)

    def get_config(self):
        if not self.fitted:
            return {"mean": None, "scale": None}
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_config(cls, config):
        if config.get("mean") is None:
            return cls()
        return cls(
            mean=np.asarray(config["mean"], dtype="float64"),
            scale=np.asarray(config["scale"], dtype="float64"),
        )
