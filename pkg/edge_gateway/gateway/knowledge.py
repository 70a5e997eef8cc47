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
"""The shared knowledge of the control loop."""

import collections
import dataclasses
import threading
from typing import Optional

from absl import logging

from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import NUM_CLASSES
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import synthetic_beats
from edge_gateway.models.ecg_cnn.ecg_cnn_presets import BOOTSTRAP_CONFIG
from edge_gateway.models.ecg_cnn.ecg_cnn_saving import load_model
from edge_gateway.models.ecg_cnn.ecg_cnn_training import train_model
from edge_gateway.triage.triage_model import TriageModel
from edge_gateway.triage.triage_model import bootstrap_triage_model
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import StateError
from edge_gateway.utils.serialization import to_canonical


@dataclasses.dataclass(frozen=True)
class FeedbackEntry:
    """What the gateway decided for one chunk.

    Args:
        chunk_index: int.
        decision: string. The triage verdict.
        priority: int. Priority of the chunk's alert, 0 without one.
        cnn_class: optional int. CNN class of an abnormal chunk.
        ground_truth: optional string. Known verdict, when labelled.
        timestamp: int. Time of the decision in ms.
    """

    chunk_index: int
    decision: str
    priority: int
    cnn_class: Optional[int] = None
    ground_truth: Optional[str] = None
    timestamp: int = 0

    def to_dict(self):
        return to_canonical(self)


def bootstrap_ecg_cnn(seed=0, epochs=2):
    """A small CNN fitted on synthetic beats.

    Stands in when no trained model file is configured.
    """
    dataset = synthetic_beats(per_class=20, num_classes=NUM_CLASSES, seed=seed)
    trained = train_model(
        dataset, config=BOOTSTRAP_CONFIG, epochs=epochs, seed=seed
    )
    return trained.model


class KnowledgeBase:
    """Versioned configuration, model references and the feedback log.

    Every configuration change bumps `version` by one. The feedback log
    keeps the latest `feedback_capacity` entries. Access is guarded by
    a lock held only for the duration of each call.

    Args:
        config: `GatewayConfig`.
        triage_model: `TriageModel`.
        cnn_model: `EcgCNN`.
    """

    def __init__(self, config, triage_model=None, cnn_model=None):
        self._config = config
        self.triage_model = triage_model
        self.cnn_model = cnn_model
        self.version = 1
        self.history = []
        self._feedback = collections.deque(maxlen=config.feedback_capacity)
        self._lock = threading.Lock()

    @property
    def config(self):
        with self._lock:
            return self._config

    @property
    def feedback(self):
        with self._lock:
            return list(self._feedback)

    def load_models(self):
        """Load the configured models, bootstrapping any that are missing."""
        config = self.config
        if self.triage_model is None:
            if config.triage_model_path:
                self.triage_model = TriageModel.load(config.triage_model_path)
            else:
                self.triage_model = bootstrap_triage_model(
                    seed=config.seed,
                    classifier=config.triage_classifier,
                    sampling_rate=config.sampling_rate,
                )
        if self.cnn_model is None:
            if config.cnn_model_path:
                self.cnn_model = load_model(
                    config.cnn_model_path,
                    expected_config={"output_classes": NUM_CLASSES},
                ).model
            else:
                self.cnn_model = bootstrap_ecg_cnn(seed=config.seed)
        logging.info("Gateway models ready at config version %d.", self.version)

    def require(self, name):
        model = getattr(self, name)
        if model is None:
            raise StateError(f"The {name.replace('_', ' ')} is not loaded.")
        return model

    def update(self, delta):
        """Apply a config delta. Returns the version after the change."""
        if not delta:
            return self.version
        with self._lock:
            try:
                self._config = dataclasses.replace(self._config, **delta)
            except TypeError as e:
                raise ConfigError(f"Invalid config delta {delta}: {e}")
            self.version += 1
            self.history.append((self.version, dict(delta)))
            return self.version

    def record_feedback(self, entry):
        with self._lock:
            self._feedback.append(entry)

    def recent_feedback(self, window):
        with self._lock:
            return list(self._feedback)[-window:]
