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
"""Tests for the Plan and Execute stages."""

import json
from unittest import mock

import tensorflow as tf

from edge_gateway.access.batch_cipher import EncryptedBatch
from edge_gateway.access.batch_cipher import decrypt_batch
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.gateway_testing import FixedTriage
from edge_gateway.gateway.gateway_testing import make_analysis
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.pipeline import EdgeGateway
from edge_gateway.utils.errors import StorageError


def make_gateway(**config):
    knowledge = KnowledgeBase(
        GatewayConfig(**config), FixedTriage("normal"), object()
    )
    return EdgeGateway(knowledge)


def committed_records(gateway):
    blocks = [
        block
        for block in gateway.chain
        if block.header.data_type == "ecg/encrypted"
    ]
    for index, block in enumerate(blocks):
        batch = EncryptedBatch.from_dict(json.loads(block.body))
        key = gateway.key_ring.child_key(index)
        yield from json.loads(decrypt_batch(key, batch))["records"]


def kinds(events):
    return [event.kind for event in events]


class PlanAndExecuteTest(tf.test.TestCase):
    def test_normal_chunk(self):
        gateway = make_gateway()
        events = gateway.plan_and_execute(make_analysis(0))
        self.assertEqual(kinds(events), ["ingest", "analysis"])
        self.assertEqual(events[0].payload["samples"], 5000)
        self.assertLen(gateway.knowledge.feedback, 1)
        self.assertEqual(gateway.knowledge.feedback[0].priority, 0)

    def test_fast_abnormal_chunk_raises_urgent_alert(self):
        gateway = make_gateway()
        events = gateway.plan_and_execute(
            make_analysis(0, "abnormal", (130.0, 131.0), cnn_class=1)
        )
        self.assertEqual(
            kinds(events), ["ingest", "analysis", "alert", "notification"]
        )
        alert = events[2].payload
        self.assertEqual(alert["priority"], 3)
        self.assertEqual(alert["metric"], "hr_bpm")
        self.assertEqual(alert["observed"], 131.0)
        self.assertEqual(events[3].payload["channel"], "caregiver")
        self.assertEqual(
            events[1].payload["class_name"], "Fusion of paced and normal"
        )
        self.assertEqual(gateway.knowledge.feedback[0].cnn_class, 1)

    def test_abnormal_chunk_at_rest_raises_triage_alert(self):
        gateway = make_gateway()
        events = gateway.plan_and_execute(
            make_analysis(0, "abnormal", (70.0, 70.0), cnn_class=2)
        )
        (alert,) = [e.payload for e in events if e.kind == "alert"]
        self.assertEqual(alert["metric"], "triage")
        self.assertEqual(alert["priority"], 2)

    def test_elevated_normal_chunk(self):
        gateway = make_gateway()
        events = gateway.plan_and_execute(make_analysis(0, "normal", (85.0,)))
        (alert,) = [e.payload for e in events if e.kind == "alert"]
        self.assertEqual(alert["priority"], 1)
        self.assertEqual(events[-1].payload["channel"], "patient")

    def test_one_feedback_entry_per_chunk(self):
        gateway = make_gateway()
        for index in range(4):
            gateway.plan_and_execute(
                make_analysis(index, "indeterminate", heart_rates=())
            )
        self.assertLen(gateway.knowledge.feedback, 4)
        self.assertEmpty(gateway.event_log.of_kind("alert"))

    def test_commits_at_period_boundaries(self):
        gateway = make_gateway(batch_period=20.0)
        for index in range(4):
            gateway.plan_and_execute(make_analysis(index))
        commits = gateway.event_log.of_kind("block_committed")
        self.assertEqual([e.timestamp for e in commits], [20002, 40002])
        self.assertEqual([e.payload["records"] for e in commits], [2, 2])
        self.assertEqual(
            [e.payload["batch_id"] for e in commits],
            ["gateway-0-batch-000000", "gateway-0-batch-000001"],
        )
        self.assertEmpty(gateway.event_log.of_kind("alert"))
        gateway.chain.verify()

    def test_alert_precedes_commit(self):
        gateway = make_gateway(batch_period=20.0)
        gateway.plan_and_execute(make_analysis(0))
        events = gateway.plan_and_execute(
            make_analysis(1, "abnormal", (130.0,), cnn_class=4)
        )
        self.assertEqual(
            kinds(events),
            [
                "ingest",
                "analysis",
                "alert",
                "notification",
                "block_committed",
            ],
        )
        timestamps = [event.timestamp for event in gateway.events]
        self.assertEqual(timestamps, sorted(set(timestamps)))

    def test_finish_commits_remainder(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        self.assertEmpty(gateway.event_log.of_kind("block_committed"))
        gateway.finish()
        (commit,) = gateway.event_log.of_kind("block_committed")
        self.assertEqual(commit.payload["records"], 1)
        gateway.finish()
        self.assertLen(gateway.event_log.of_kind("block_committed"), 1)

    def test_urgent_alerts_reconfigure(self):
        gateway = make_gateway()
        for index in range(3):
            gateway.plan_and_execute(
                make_analysis(index, "abnormal", (130.0,), cnn_class=4)
            )
        (reconfig,) = gateway.event_log.of_kind("reconfig")
        self.assertEqual(
            reconfig.payload, {"delta": {"batch_period": 30.0}, "version": 2}
        )
        self.assertEqual(gateway.buffer.period_ms, 30000)
        self.assertEqual(gateway.buffer.next_boundary, 60000)
        self.assertLen(gateway.event_log.of_kind("block_committed"), 1)


class CommitBatchTest(tf.test.TestCase):
    def test_no_plaintext_on_chain(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0, ground_truth="normal"))
        gateway.finish()
        for block in gateway.chain:
            self.assertNotIn(b"mean_hr_bpm", block.body)
            self.assertNotIn(b"verdict", block.body)
        encrypted = [
            block
            for block in gateway.chain
            if block.header.data_type == "ecg/encrypted"
        ]
        self.assertLen(encrypted, 1)
        batch = EncryptedBatch.from_dict(json.loads(encrypted[0].body))
        plaintext = json.loads(
            decrypt_batch(gateway.key_ring.child_key(0), batch)
        )
        self.assertEqual(plaintext["records"][0]["verdict"], "normal")

    def test_batches_store_wavelet_bands(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        gateway.finish()
        (record,) = committed_records(gateway)
        self.assertEqual(record["storage"], "wavelet")
        self.assertEqual(record["wavelet"]["num_levels"], 2)
        self.assertEqual(record["wavelet"]["original_length"], 5000)
        self.assertEqual(record["wavelet"]["band_lengths"], [2500, 1250])
        self.assertLen(record["wavelet"]["approx"], 1250)

        raw_gateway = make_gateway(sample_budget=0)
        raw_gateway.plan_and_execute(make_analysis(0))
        raw_gateway.finish()
        (raw,) = committed_records(raw_gateway)
        self.assertEqual(raw["storage"], "raw")
        self.assertLess(
            len(json.dumps(record["wavelet"])), len(json.dumps(raw["samples"]))
        )

    def test_listing_matches_block(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        gateway.finish()
        listing = gateway.market.get_listing("gateway-0-batch-000000")
        self.assertEqual(listing.owner_id, "gateway-0")
        self.assertEqual(listing.min_deposit, 10)
        self.assertIn("gateway-0", gateway.market.devices)

    def test_retries_failed_appends(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        add = gateway.chain.add
        failures = [StorageError("disk busy"), StorageError("disk busy")]

        def flaky_add(*args):
            if failures:
                raise failures.pop()
            return add(*args)

        with mock.patch.object(gateway.chain, "add", side_effect=flaky_add):
            gateway.finish()
        self.assertLen(gateway.event_log.of_kind("block_committed"), 1)
        self.assertEmpty(gateway.event_log.of_kind("dead_letter"))

    def test_dead_letter_after_max_attempts(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        with mock.patch.object(
            gateway.chain, "add", side_effect=StorageError("disk full")
        ) as add:
            gateway.finish()
        self.assertEqual(add.call_count, 3)
        (dead,) = gateway.event_log.of_kind("dead_letter")
        self.assertEqual(dead.payload["attempts"], 3)
        self.assertIn("disk full", dead.payload["error"])
        self.assertLen(gateway.chain, 1)
        self.assertLen(gateway.dead_letters, 1)
        self.assertEmpty(gateway.market.devices)


class TradeTest(tf.test.TestCase):
    def test_buyers_trade_for_batches(self):
        gateway = make_gateway()
        gateway.plan_and_execute(make_analysis(0))
        gateway.finish()
        trades = gateway.trade(
            [
                {"id": "hospital", "balance": 50, "deposit": 10},
                {"id": "lab", "balance": 50, "deposit": 5},
                {"id": "clinic", "balance": 5, "deposit": 10},
            ]
        )
        self.assertEqual(
            [trade.get("state") for trade in trades],
            ["finalized", "refunded", None],
        )
        self.assertIn("InsufficientBalanceError", trades[2]["error"])
        escrow = gateway.market.escrow
        self.assertEqual(escrow.balance("gateway-0"), 10)
        self.assertEqual(escrow.balance("hospital"), 40)
        self.assertEqual(escrow.balance("lab"), 50)
        self.assertEqual(escrow.balance("clinic"), 5)
        self.assertEqual(gateway.market.open_deals(), [])
