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
"""The gateway event log."""

import dataclasses
import threading
from typing import Any

from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import canonical_json
from edge_gateway.utils.serialization import to_canonical

INGEST = "ingest"
ANALYSIS = "analysis"
ALERT = "alert"
NOTIFICATION = "notification"
BLOCK_COMMITTED = "block_committed"
DEAD_LETTER = "dead_letter"
RECONFIG = "reconfig"
EVENT_KINDS = (
    INGEST,
    ANALYSIS,
    ALERT,
    NOTIFICATION,
    BLOCK_COMMITTED,
    DEAD_LETTER,
    RECONFIG,
)


@dataclasses.dataclass(frozen=True)
class PipelineEvent:
    kind: str
    payload: Any
    timestamp: int

    def to_dict(self):
        return to_canonical(self)

    def to_json(self):
        return canonical_json(self)


class EventLog:
    """Append-only events with strictly increasing timestamps.

    An event emitted at time `t` is stamped `max(t, last + 1)`, so events
    sharing a time keep their emission order.
    """

    def __init__(self):
        self.events = []
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(list(self.events))

    def next_timestamp(self, time_ms):
        if not self.events:
            return int(time_ms)
        return max(int(time_ms), self.events[-1].timestamp + 1)

    def emit(self, kind, payload, time_ms):
        if kind not in EVENT_KINDS:
            raise ParameterError(
                f"`kind` must be one of {EVENT_KINDS}. Received: kind={kind}"
            )
        with self._lock:
            event = PipelineEvent(
                kind, to_canonical(payload), self.next_timestamp(time_ms)
            )
            self.events.append(event)
        return event

    def of_kind(self, kind):
        return [event for event in self.events if event.kind == kind]

    def to_ndjson(self):
        return "".join(event.to_json() + "\n" for event in self.events)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_ndjson())
