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
"""Tests for the sidechain store."""

import tensorflow as tf

from edge_gateway.ledger.sidechain import SideChainEntry
from edge_gateway.ledger.sidechain import SideChainStore
from edge_gateway.ledger.sidechain import record_sidechain
from edge_gateway.utils.errors import IdempotencyError
from edge_gateway.utils.errors import NotFoundError
from edge_gateway.utils.serialization import sha256


def make_entry(index, batch_id="batch-0"):
    return SideChainEntry(
        block_hash=sha256(str(index).encode()),
        batch_id=batch_id,
        data_type="ecg",
        size=1024,
        owner_id="patient-1",
        timestamp=index,
    )


class SideChainStoreTest(tf.test.TestCase):
    def test_record_and_get(self):
        store = SideChainStore()
        entry = record_sidechain(make_entry(1), store)
        self.assertLen(store, 1)
        self.assertIn(entry.block_hash, store)
        self.assertEqual(store.get(entry.block_hash), entry)

    def test_duplicate_rejected(self):
        store = SideChainStore()
        record_sidechain(make_entry(1), store)
        with self.assertRaises(IdempotencyError):
            record_sidechain(make_entry(1, batch_id="other"), store)
        self.assertLen(store, 1)
        self.assertEqual(store.find_batch("other"), [])

    def test_unknown_hash(self):
        with self.assertRaises(NotFoundError):
            SideChainStore().get(sha256(b"missing"))

    def test_find_batch(self):
        store = SideChainStore()
        first = store.record(make_entry(1, "batch-a"))
        store.record(make_entry(2, "batch-b"))
        third = store.record(make_entry(3, "batch-a"))
        self.assertEqual(store.find_batch("batch-a"), [first, third])
        self.assertLen(store.entries(), 3)

    def test_entry_has_no_payload(self):
        entry = make_entry(1).to_dict()
        self.assertEqual(
            sorted(entry),
            [
                "batch_id",
                "block_hash",
                "data_type",
                "owner_id",
                "size",
                "timestamp",
            ],
        )
        self.assertEqual(entry["block_hash"], sha256(b"1").hex())
