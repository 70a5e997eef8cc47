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
"""Binary normal/abnormal triage over beat features."""

import dataclasses
import json

import numpy as np
from absl import logging

from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.features import BeatFeatures
from edge_gateway.dsp.synthetic import ARRHYTHMIA_SHAPE
from edge_gateway.dsp.synthetic import BeatShape
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.triage.feature_scaling import FeatureScaler
from edge_gateway.triage.feature_scaling import features_to_matrix
from edge_gateway.triage.linear_svm import ABNORMAL
from edge_gateway.triage.linear_svm import NORMAL
from edge_gateway.triage.linear_svm import LinearSvmModel
from edge_gateway.triage.linear_svm import svm_predict
from edge_gateway.triage.linear_svm import svm_train
from edge_gateway.triage.naive_bayes import GaussianNbModel
from edge_gateway.triage.naive_bayes import nb_predict
from edge_gateway.triage.naive_bayes import nb_train
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import canonical_json

CLASSIFIERS = ("svm", "nb")

VERDICT_NORMAL = "normal"
VERDICT_ABNORMAL = "abnormal"
VERDICT_INDETERMINATE = "indeterminate"


def _as_matrix(features):
    if isinstance(features, np.ndarray):
        return features
    features = list(features)
    if features and isinstance(features[0], BeatFeatures):
        return features_to_matrix(features)
    return np.asarray(features, dtype="float64")


@dataclasses.dataclass(eq=False)
class TriageModel:
    """A fitted scaler and binary classifier.

    Labels are `-1` (normal) and `+1` (abnormal). A chunk is abnormal when
    at least `abnormal_fraction` of its beats are.
    """

    classifier: str
    scaler: FeatureScaler
    model: object
    abnormal_fraction: float = 0.5

    @classmethod
    def fit(
        cls,
        features,
        labels,
        classifier="svm",
        seed=0,
        regularization=0.01,
        epochs=50,
        abnormal_fraction=0.5,
    ):
        """Fit on a feature matrix (or list of `BeatFeatures`) and labels."""
        if classifier not in CLASSIFIERS:
            raise ParameterError(
                f"`classifier` must be one of {CLASSIFIERS}. "
                f"Received: classifier={classifier}"
            )
        scaler = FeatureScaler()
        scaled = scaler.fit_transform(_as_matrix(features))
        if classifier == "svm":
            model = svm_train(
                scaled,
                labels,
                regularization=regularization,
                epochs=epochs,
                seed=seed,
            )
        else:
            model = nb_train(scaled, labels)
        logging.info(
            "Fitted %s triage model on %d beats.", classifier, len(scaled)
        )
        return cls(
            classifier=classifier,
            scaler=scaler,
            model=model,
            abnormal_fraction=abnormal_fraction,
        )

    def predict(self, features):
        """Per-beat `-1` / `+1` labels."""
        matrix = _as_matrix(features)
        if len(matrix) == 0:
            return np.zeros((0,), dtype="int64")
        scaled = self.scaler.transform(matrix)
        if self.classifier == "svm":
            labels, _ = svm_predict(self.model, scaled)
        else:
            labels, _ = nb_predict(self.model, scaled)
        return np.asarray(labels, dtype="int64")

    def classify(self, beats):
        """Verdict for one chunk of `BeatFeatures`."""
        if not beats:
            return VERDICT_INDETERMINATE
        labels = self.predict(beats)
        if np.mean(labels == ABNORMAL) >= self.abnormal_fraction:
            return VERDICT_ABNORMAL
        return VERDICT_NORMAL

    def get_config(self):
        return {
            "classifier": self.classifier,
            "scaler": self.scaler.get_config(),
            "model": self.model.get_config(),
            "abnormal_fraction": self.abnormal_fraction,
        }

    @classmethod
    def from_config(cls, config):
        classifier = config.get("classifier")
        if classifier not in CLASSIFIERS:
            raise FormatError(f"Unknown triage classifier {classifier!r}.")
        model_cls = LinearSvmModel if classifier == "svm" else GaussianNbModel
        return cls(
            classifier=classifier,
            scaler=FeatureScaler.from_config(config["scaler"]),
            model=model_cls.from_config(config["model"]),
            abnormal_fraction=float(config.get("abnormal_fraction", 0.5)),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(canonical_json(self.get_config()))

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        try:
            return cls.from_config(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise FormatError(f"{path} is not a triage model file: {e}")


def synthetic_triage_data(seed=0, sampling_rate=500, duration=20.0):
    """Labelled beat features from synthetic normal and arrhythmic rhythms.

    Returns:
        A tuple `(beats, labels)`.
    """
    rng = np.random.default_rng(seed)
    recordings = [
        (BeatShape(), rate, NORMAL) for rate in (55.0, 65.0, 75.0, 85.0, 95.0)
    ]
    recordings += [
        (ARRHYTHMIA_SHAPE, rate, ABNORMAL)
        for rate in (60.0, 80.0, 100.0, 120.0, 140.0)
    ]
    beats, labels = [], []
    for shape, rate, label in recordings:
        ecg = synthesize_ecg(
            duration,
            heart_rate=rate,
            sampling_rate=sampling_rate,
            shape=shape,
            noise_std=0.02,
            seed=int(rng.integers(2**31)),
        )
        analysis = analyze_signal(ecg.signal)
        beats.extend(analysis.beats)
        labels.extend([label] * len(analysis.beats))
    return beats, np.asarray(labels, dtype="int64")


def bootstrap_triage_model(seed=0, classifier="svm", sampling_rate=500):
    """A triage model trained on `synthetic_triage_data`.

    Used by the gateway when no fitted model file is configured.
    """
    beats, labels = synthetic_triage_data(seed, sampling_rate=sampling_rate)
    return TriageModel.fit(beats, labels, classifier=classifier, seed=seed)
