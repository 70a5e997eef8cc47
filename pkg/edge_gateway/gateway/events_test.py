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
"""Tests for the gateway event log."""

import json
import os

import numpy as np
import tensorflow as tf

from edge_gateway.gateway import events
from edge_gateway.utils.errors import ParameterError


class EventLogTest(tf.test.TestCase):
    def test_timestamps_strictly_increase(self):
        log = events.EventLog()
        log.emit(events.INGEST, {"chunk": 0}, 100)
        log.emit(events.ANALYSIS, {"chunk": 0}, 100)
        log.emit(events.ALERT, {"priority": 3}, 50)
        log.emit(events.INGEST, {"chunk": 1}, 200)
        self.assertEqual([e.timestamp for e in log], [100, 101, 102, 200])
        self.assertLen(log.of_kind(events.INGEST), 2)

    def test_unknown_kind(self):
        with self.assertRaisesRegex(ParameterError, "kind"):
            events.EventLog().emit("heartbeat", {}, 0)

    def test_payload_is_canonical(self):
        log = events.EventLog()
        event = log.emit(
            events.BLOCK_COMMITTED,
            {"height": np.int64(4), "block_hash": b"\x01\xff"},
            10,
        )
        self.assertEqual(event.payload, {"height": 4, "block_hash": "01ff"})
        self.assertEqual(
            event.to_json(),
            '{"kind":"block_committed","payload":{"block_hash":"01ff",'
            '"height":4},"timestamp":10}',
        )

    def test_write_ndjson(self):
        log = events.EventLog()
        log.emit(events.INGEST, {"chunk": 0}, 0)
        log.emit(events.RECONFIG, {"version": 2}, 0)
        path = os.path.join(self.get_temp_dir(), "events.ndjson")
        log.write(path)
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(
            [json.loads(line)["kind"] for line in lines],
            ["ingest", "reconfig"],
        )
