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
"""Configuration of the gateway control loop."""

import dataclasses
import json
from typing import Optional

from edge_gateway.triage.alerts import default_rules
from edge_gateway.triage.triage_model import CLASSIFIERS
from edge_gateway.utils.errors import ConfigError

DEFAULT_BATCH_PERIOD = 60.0
MIN_BATCH_PERIOD = 10.0


@dataclasses.dataclass(frozen=True)
class GatewayConfig:
    """Everything the gateway reads from its knowledge base.

    Times are in seconds unless the name says otherwise.

    Args:
        gateway_id: string. Id the gateway registers and signs under.
        sampling_rate: int. Expected rate of the incoming stream in Hz.
        chunk_seconds: float. Length of the analyzed chunks.
        batch_period: float. Period `T` of the batch flushes.
        min_batch_period: float. Lower bound of `batch_period`.
        max_batch_period: float. Upper bound of `batch_period`.
        heart_rate_thresholds: tuple of `(bpm, priority)` alert rules.
        temperature_threshold: float. Gateway temperature limit in Celsius.
        data_timeout: float. Longest tolerated data gap in ms.
        abnormal_priority: int. Priority of the alert raised for an abnormal
            chunk that violates no heart-rate rule.
        triage_classifier: `"svm"` or `"nb"`, used when no triage model file
            is configured.
        triage_model_path: optional path of a saved `TriageModel`.
        cnn_model_path: optional path of a saved CNN model.
        feedback_window: int. Feedback entries `system_manage` looks at.
        feedback_capacity: int. Entries the feedback log keeps before the
            oldest are dropped.
        escalation_count: int. Entries of one kind in the window that
            trigger a reconfiguration.
        threshold_step: float. Raise of the lowest heart-rate threshold
            after repeated false alarms.
        max_threshold: float. Upper bound of that threshold.
        max_append_attempts: int. Ledger append attempts before a batch is
            dead-lettered.
        wavelet_levels: int. Decomposition levels of the stored chunks.
        sample_budget: optional int. Samples one batch may compress before
            further chunks are stored raw. `None` means no limit.
        data_type: string. Tag of the stored batches.
        min_deposit: int. Deposit condition of the listed batches.
        buyers: tuple of dicts with `id`, `balance` and `deposit`. Buyers
            that trade for every listed batch after a replay.
        seed: int. Seeds keys, models and nonces.
    """

    gateway_id: str = "gateway-0"
    sampling_rate: int = 500
    chunk_seconds: float = 10.0
    batch_period: float = DEFAULT_BATCH_PERIOD
    min_batch_period: float = MIN_BATCH_PERIOD
    max_batch_period: float = DEFAULT_BATCH_PERIOD
    heart_rate_thresholds: tuple = ((80.0, 1), (120.0, 3))
    temperature_threshold: float = 70.0
    data_timeout: float = 30000.0
    abnormal_priority: int = 2
    triage_classifier: str = "svm"
    triage_model_path: Optional[str] = None
    cnn_model_path: Optional[str] = None
    feedback_window: int = 6
    feedback_capacity: int = 10000
    escalation_count: int = 3
    threshold_step: float = 5.0
    max_threshold: float = 100.0
    max_append_attempts: int = 3
    wavelet_levels: int = 2
    sample_budget: Optional[int] = None
    data_type: str = "ecg"
    min_deposit: int = 10
    buyers: tuple = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self,
            "heart_rate_thresholds",
            tuple(
                (float(bpm), int(priority))
                for bpm, priority in self.heart_rate_thresholds
            ),
        )
        object.__setattr__(
            self, "buyers", tuple(dict(b) for b in self.buyers)
        )
        if self.sampling_rate <= 0 or self.chunk_seconds <= 0:
            raise ConfigError(
                "`sampling_rate` and `chunk_seconds` must be positive. "
                f"Received: sampling_rate={self.sampling_rate}, "
                f"chunk_seconds={self.chunk_seconds}"
            )
        if not (
            0 < self.min_batch_period
            <= self.batch_period
            <= self.max_batch_period
        ):
            raise ConfigError(
                "Batch periods must satisfy `0 < min_batch_period <= "
                "batch_period <= max_batch_period`. Received: "
                f"min_batch_period={self.min_batch_period}, "
                f"batch_period={self.batch_period}, "
                f"max_batch_period={self.max_batch_period}"
            )
        if self.triage_classifier not in CLASSIFIERS:
            raise ConfigError(
                f"`triage_classifier` must be one of {CLASSIFIERS}. "
                f"Received: triage_classifier={self.triage_classifier}"
            )
        if self.feedback_window < 1 or self.escalation_count < 1:
            raise ConfigError(
                "`feedback_window` and `escalation_count` must be >= 1. "
                f"Received: feedback_window={self.feedback_window}, "
                f"escalation_count={self.escalation_count}"
            )
        if self.wavelet_levels < 1:
            raise ConfigError(
                "`wavelet_levels` must be >= 1. "
                f"Received: wavelet_levels={self.wavelet_levels}"
            )
        if self.sample_budget is not None and self.sample_budget < 0:
            raise ConfigError(
                "`sample_budget` must be None or >= 0. "
                f"Received: sample_budget={self.sample_budget}"
            )
        if self.feedback_capacity < self.feedback_window:
            raise ConfigError(
                "`feedback_capacity` must be >= `feedback_window`. "
                f"Received: feedback_capacity={self.feedback_capacity}, "
                f"feedback_window={self.feedback_window}"
            )
        if self.max_append_attempts < 1:
            raise ConfigError(
                "`max_append_attempts` must be >= 1. "
                f"Received: max_append_attempts={self.max_append_attempts}"
            )
        for buyer in self.buyers:
            if not {"id", "balance", "deposit"} <= set(buyer):
                raise ConfigError(
                    "Buyers need `id`, `balance` and `deposit` entries. "
                    f"Received: {buyer}"
                )

    @property
    def chunk_size(self):
        return int(round(self.chunk_seconds * self.sampling_rate))

    def alert_rules(self):
        try:
            return default_rules(
                heart_rate_thresholds=self.heart_rate_thresholds,
                temperature_threshold=self.temperature_threshold,
                data_timeout=self.data_timeout,
            )
        except ValueError as e:
            raise ConfigError(f"Invalid alert rules: {e}")

    def get_config(self):
        config = dataclasses.asdict(self)
        config["heart_rate_thresholds"] = [
            list(pair) for pair in self.heart_rate_thresholds
        ]
        config["buyers"] = [dict(b) for b in self.buyers]
        return config

    @classmethod
    def from_config(cls, config):
        try:
            return cls(**config)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid gateway config: {e}")

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path} is not valid JSON: {e}")
        return cls.from_config(config)
