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
"""Rule-based priority alerting on vital signs and gateway health."""

import dataclasses
from typing import Optional

import numpy as np

from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import canonical_json

HEART_RATE = "hr_bpm"
GATEWAY_TEMPERATURE = "gateway_temp"
DATA_TIMEOUT = "data_timeout"
METRICS = (HEART_RATE, GATEWAY_TEMPERATURE, DATA_TIMEOUT)
DIRECTIONS = ("above", "below")


@dataclasses.dataclass(frozen=True)
class AlertRule:
    """Fire at `priority` when `metric` is beyond `threshold`.

    Heart rate is in bpm, gateway temperature in degrees Celsius and the data
    timeout in ms since the last received sample.
    """

    metric: str
    threshold: float
    priority: int
    direction: str = "above"

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ParameterError(
                f"`metric` must be one of {METRICS}. "
                f"Received: metric={self.metric}"
            )
        if self.direction not in DIRECTIONS:
            raise ParameterError(
                f"`direction` must be one of {DIRECTIONS}. "
                f"Received: direction={self.direction}"
            )
        if int(self.priority) != self.priority or self.priority < 1:
            raise ParameterError(
                "`priority` must be an integer >= 1. "
                f"Received: priority={self.priority}"
            )

    def extreme(self, values):
        """The observation most likely to violate this rule."""
        return max(values) if self.direction == "above" else min(values)

    def violated(self, value):
        if self.direction == "above":
            return value > self.threshold
        return value < self.threshold

    def get_config(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_config(cls, config):
        return cls(**config)


@dataclasses.dataclass(frozen=True)
class AlertEvent:
    priority: int
    metric: str
    observed: float
    timestamp: int
    source: str

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return canonical_json(self)


def default_rules(
    heart_rate_thresholds=((80.0, 1), (120.0, 3)),
    temperature_threshold=70.0,
    data_timeout=30000.0,
    temperature_priority=2,
    timeout_priority=2,
):
    """The gateway's built-in rule set.

    Args:
        heart_rate_thresholds: sequence of `(bpm, priority)` pairs.
        temperature_threshold: float. Gateway temperature limit in Celsius.
        data_timeout: float. Longest tolerated gap without data in ms.
        temperature_priority: int. Priority of overheating alerts.
        timeout_priority: int. Priority of data-timeout alerts.
    """
    rules = [
        AlertRule(HEART_RATE, float(bpm), int(priority))
        for bpm, priority in heart_rate_thresholds
    ]
    rules.append(
        AlertRule(
            GATEWAY_TEMPERATURE,
            float(temperature_threshold),
            temperature_priority,
        )
    )
    rules.append(AlertRule(DATA_TIMEOUT, float(data_timeout), timeout_priority))
    return tuple(rules)


def _observations(hr_series, temperature, last_data_age):
    hr = [] if hr_series is None else np.asarray(hr_series, dtype="float64")
    hr = [float(v) for v in np.ravel(hr) if np.isfinite(v)]
    observations = {HEART_RATE: hr}
    observations[GATEWAY_TEMPERATURE] = (
        [] if temperature is None else [float(temperature)]
    )
    observations[DATA_TIMEOUT] = (
        [] if last_data_age is None else [float(last_data_age)]
    )
    return observations


def raise_alerts(
    hr_series,
    temperature=None,
    last_data_age=None,
    rules=None,
    timestamp=0,
    source="gateway",
):
    """Evaluate alert rules and return the resulting `AlertEvent`s.

    For each metric, only the violated rule with the highest priority fires,
    so a metric yields at most one event. Events come out in `METRICS` order
    and the i-th event is stamped `timestamp + i`.

    Args:
        hr_series: sequence of heart rates in bpm. Non-finite values are
            ignored.
        temperature: float or None. Gateway temperature in Celsius.
        last_data_age: float or None. Time since the last sample in ms.
        rules: sequence of `AlertRule`. Defaults to `default_rules()`.
        timestamp: int. Time of the evaluation in ms since the epoch.
        source: string. Id of the reporting gateway.
    """
    rules = default_rules() if rules is None else tuple(rules)
    observations = _observations(hr_series, temperature, last_data_age)
    events = []
    for metric in METRICS:
        values = observations[metric]
        if not values:
            continue
        fired: Optional[tuple] = None
        for rule in rules:
            if rule.metric != metric:
                continue
            observed = rule.extreme(values)
            if rule.violated(observed) and (
                fired is None or rule.priority > fired[0].priority
            ):
                fired = (rule, observed)
        if fired is not None:
            rule, observed = fired
            events.append(
                AlertEvent(
                    priority=rule.priority,
                    metric=metric,
                    observed=observed,
                    timestamp=int(timestamp) + len(events),
                    source=source,
                )
            )
    return events
