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
"""Tests for the data-trade protocol."""

import dataclasses

import tensorflow as tf

from edge_gateway.access.batch_cipher import encrypt_batch
from edge_gateway.access.kem import X25519Kem
from edge_gateway.access.key_delivery import request_key
from edge_gateway.access.key_ring import KeyRing
from edge_gateway.access.signatures import Ed25519Signature
from edge_gateway.ledger.chain import Chain
from edge_gateway.market.data_market import DataMarket
from edge_gateway.market.records import DeviceRegistration
from edge_gateway.utils.errors import AuthorizationError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import FreshnessError
from edge_gateway.utils.errors import IdempotencyError
from edge_gateway.utils.errors import InsufficientBalanceError
from edge_gateway.utils.errors import IntegrityError
from edge_gateway.utils.errors import NotFoundError
from edge_gateway.utils.errors import SignatureError
from edge_gateway.utils.errors import StorageError
from edge_gateway.utils.errors import TamperError
from edge_gateway.utils.errors import TransitionError
from edge_gateway.utils.serialization import sha256

PLAINTEXT = b"ecg samples " * 40


@dataclasses.dataclass
class Party:
    key_ring: KeyRing
    signing_keys: object
    kem_keys: object
    registration: DeviceRegistration


def make_party(name):
    key_ring = KeyRing.create(sha256(name.encode()))
    signing_keys = key_ring.signing_key_pair(Ed25519Signature())
    kem_keys = X25519Kem().generate_keypair(seed=sha256(name.encode() + b"k"))
    registration = DeviceRegistration(
        device_id=name,
        owner_id="gateway-1",
        verification_key=signing_keys.public_key,
        signature_algorithm=signing_keys.algorithm_id,
        kem_public_key=kem_keys.public_key,
        kem_algorithm=kem_keys.algorithm_id,
    )
    return Party(key_ring, signing_keys, kem_keys, registration)


class DataMarketTest(tf.test.TestCase):
    def setUp(self):
        super().setUp()
        self.market = DataMarket()
        self.seller = make_party("seller")
        self.buyer = make_party("buyer")
        self.market.register_device(self.seller.registration)
        self.market.register_device(self.buyer.registration, balance=100)
        self.batch = encrypt_batch(
            self.seller.key_ring.child_key(0), PLAINTEXT, "batch-0"
        )
        self.listing = self.market.list_batch(
            "seller", self.batch, min_deposit=10
        )

    def deliver(self, deal_id, signing_keys=None, timestamp=5000, now=5000):
        request = request_key(
            signing_keys or self.buyer.signing_keys,
            "buyer",
            "batch-0",
            timestamp=timestamp,
        )
        return self.market.deliver_deal_key(
            deal_id,
            request,
            self.seller.key_ring.child_key(0),
            self.seller.signing_keys,
            now=now,
        )

    def delivered_deal(self, deposit=10):
        deal = self.market.request_deal("buyer", "batch-0", deposit)
        self.market.confirm_deal(deal.deal_id)
        self.deliver(deal.deal_id)
        return deal.deal_id

    def test_register(self):
        self.assertIn("buyer", self.market.devices)
        self.assertEqual(self.market.escrow.balance("buyer"), 100)
        with self.assertRaises(IdempotencyError):
            self.market.register_device(self.buyer.registration)

    def test_register_malformed_keys(self):
        registration = make_party("other").registration
        with self.assertRaises(FormatError):
            self.market.register_device(
                dataclasses.replace(registration, verification_key=b"short")
            )
        with self.assertRaises(FormatError):
            self.market.register_device(
                dataclasses.replace(registration, kem_algorithm="RSA")
            )
        self.assertNotIn("other", self.market.devices)

    def test_unregistered_buyer(self):
        with self.assertRaises(AuthorizationError):
            self.market.request_deal("stranger", "batch-0", 10)

    def test_listing(self):
        self.assertEqual(self.market.query_listings("ecg"), [self.listing])
        self.assertEqual(self.market.query_listings("eeg"), [])
        payload = self.market.storage.get(self.listing.payload_digest)
        self.assertEqual(sha256(payload), self.listing.payload_digest)
        self.assertEqual(
            sha256(self.batch.to_json().encode()), self.listing.payload_digest
        )
        self.assertNotIn(PLAINTEXT[:24], payload)
        (entry,) = self.market.sidechain.find_batch("batch-0")
        self.assertEqual(entry.block_hash, self.market.chain.tip.block_hash)

    def test_listing_digest_mismatch(self):
        batch = encrypt_batch(self.seller.key_ring.child_key(1), b"x", "b-1")
        with self.assertRaises(IntegrityError):
            self.market.list_batch(
                "seller", batch, expected_digest=sha256(b"other")
            )
        self.assertEqual(self.market.query_listings(), [self.listing])

    def test_request_locks_deposit(self):
        deal = self.market.request_deal("buyer", "batch-0", 10)
        self.assertEqual(deal.state, "requested")
        self.assertEqual(self.market.escrow.balance("buyer"), 90)
        self.assertEqual(self.market.escrow.locked, {deal.deal_id: 10})

    def test_request_rejections_leave_state(self):
        before = self.market.state()
        height = self.market.chain.height
        with self.assertRaises(InsufficientBalanceError):
            self.market.request_deal("buyer", "batch-0", 101)
        with self.assertRaises(NotFoundError):
            self.market.request_deal("buyer", "batch-9", 10)
        self.assertEqual(self.market.state(), before)
        self.assertEqual(self.market.chain.height, height)

    def test_confirm_boundary(self):
        deal = self.market.request_deal("buyer", "batch-0", 10)
        self.assertEqual(self.market.confirm_deal(deal.deal_id), "confirmed")
        low = self.market.request_deal("buyer", "batch-0", 9)
        self.assertEqual(self.market.confirm_deal(low.deal_id), "requested")

    def test_confirm_wrong_state(self):
        deal_id = self.delivered_deal()
        self.market.finalize(deal_id, True)
        with self.assertRaises(TransitionError):
            self.market.confirm_deal(deal_id)

    def test_honest_delivery(self):
        deal_id = self.delivered_deal()
        self.assertEqual(self.market.get_deal(deal_id).state, "key_delivered")
        plaintext = self.market.open_deal(
            deal_id, self.buyer.kem_keys.secret_key
        )
        self.assertEqual(plaintext, PLAINTEXT)
        self.assertEqual(sha256(plaintext), self.batch.plaintext_digest)

    def test_forged_request(self):
        deal = self.market.request_deal("buyer", "batch-0", 10)
        self.market.confirm_deal(deal.deal_id)
        forger = make_party("forger")
        with self.assertRaises(SignatureError):
            self.deliver(deal.deal_id, signing_keys=forger.signing_keys)
        with self.assertRaises(FreshnessError):
            self.deliver(deal.deal_id, timestamp=0, now=60_001)
        self.assertEqual(self.market.get_deal(deal.deal_id).state, "confirmed")
        self.assertEqual(self.market.envelopes, {})

    def test_wrong_seller_keys(self):
        deal = self.market.request_deal("buyer", "batch-0", 10)
        self.market.confirm_deal(deal.deal_id)
        request = request_key(
            self.buyer.signing_keys, "buyer", "batch-0", timestamp=0
        )
        with self.assertRaises(AuthorizationError):
            self.market.deliver_deal_key(
                deal.deal_id,
                request,
                self.seller.key_ring.child_key(0),
                self.buyer.signing_keys,
                now=0,
            )

    def test_deliver_before_confirm(self):
        deal = self.market.request_deal("buyer", "batch-0", 10)
        with self.assertRaises(TransitionError):
            self.deliver(deal.deal_id)

    def test_finalize_satisfied(self):
        deal_id = self.delivered_deal()
        self.assertEqual(self.market.finalize(deal_id, True), "finalized")
        self.assertEqual(self.market.escrow.balance("seller"), 10)
        self.assertEqual(self.market.escrow.locked, {})
        with self.assertRaises(TransitionError):
            self.market.finalize(deal_id, True)

    def test_finalize_unsatisfied(self):
        deal_id = self.delivered_deal()
        self.assertEqual(self.market.finalize(deal_id, False), "disputed")
        self.assertEqual(self.market.escrow.locked, {deal_id: 10})
        with self.assertRaises(TransitionError):
            self.market.finalize(deal_id, True)

    def test_dispute_over_tampered_payload(self):
        deal_id = self.delivered_deal()
        digest = self.listing.payload_digest
        self.market.storage.overwrite(digest, b"tampered")
        with self.assertRaises(IntegrityError):
            self.market.open_deal(deal_id, self.buyer.kem_keys.secret_key)
        self.market.finalize(deal_id, False)
        self.assertEqual(self.market.resolve_dispute(deal_id), "refunded")
        self.assertEqual(self.market.escrow.balance("buyer"), 100)
        self.assertEqual(self.market.escrow.balance("seller"), 0)

    def test_dispute_over_intact_payload(self):
        deal_id = self.delivered_deal()
        self.market.finalize(deal_id, False)
        self.assertEqual(self.market.resolve_dispute(deal_id), "finalized")
        self.assertEqual(self.market.escrow.balance("seller"), 10)

    def test_dispute_with_missing_payload(self):
        deal_id = self.delivered_deal()
        self.market.finalize(deal_id, False)
        self.market.storage.drop(self.listing.payload_digest)
        with self.assertRaises(StorageError):
            self.market.resolve_dispute(deal_id)
        self.assertEqual(self.market.get_deal(deal_id).state, "disputed")
        with self.assertRaises(TransitionError):
            self.market.resolve_dispute(self.delivered_deal())

    def test_settlement_confirms_and_expires(self):
        good = self.market.request_deal("buyer", "batch-0", 12)
        low = self.market.request_deal("buyer", "batch-0", 3)
        self.assertEqual(self.market.settle(), {good.deal_id: "confirmed"})
        self.assertEqual(self.market.settle(), {})
        self.assertEqual(self.market.settle(), {low.deal_id: "refunded"})
        self.assertEqual(self.market.escrow.balance("buyer"), 88)
        self.assertEqual(self.market.round, 3)

    def test_one_block_per_operation(self):
        height = self.market.chain.height
        deal = self.market.request_deal("buyer", "batch-0", 10)
        self.market.confirm_deal(deal.deal_id)
        self.deliver(deal.deal_id)
        self.market.finalize(deal.deal_id, True)
        self.assertEqual(self.market.chain.height, height + 4)
        self.assertEqual(
            [r["op"] for r in self.market.trace()[-4:]],
            ["request_deal", "confirm_deal", "deliver_deal_key", "finalize"],
        )

    def test_replay(self):
        first = self.delivered_deal()
        self.market.finalize(first, False)
        self.market.resolve_dispute(first)
        self.market.request_deal("buyer", "batch-0", 5)
        for _ in range(3):
            self.market.settle()
        self.delivered_deal(deposit=20)
        replayed = DataMarket.replay(self.market.chain)
        self.assertEqual(replayed.state(), self.market.state())
        self.assertEqual(replayed.escrow.total(), 100)

    def test_replay_of_tampered_chain(self):
        self.delivered_deal()
        blocks = list(self.market.chain)
        blocks[-1] = dataclasses.replace(blocks[-1], body=b"{}")
        with self.assertRaises(TamperError):
            DataMarket.replay(Chain.from_blocks(blocks))

    def test_replay_ignores_other_blocks(self):
        self.market.chain.add(b"opaque", "ecg/encrypted", 0)
        self.market.request_deal("buyer", "batch-0", 10)
        replayed = DataMarket.replay(self.market.chain)
        self.assertEqual(replayed.state(), self.market.state())
