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
"""The data-trade protocol as an event-sourced state machine.

Every accepted operation is serialized to a canonical JSON record and
appended to the ledger as one block with data type `market/<operation>`.
State only changes by applying such records, so `DataMarket.replay(chain)`
rebuilds exactly the state of the market that wrote the chain.
"""

import dataclasses
import json
import threading

from absl import logging

from edge_gateway.access.batch_cipher import EncryptedBatch
from edge_gateway.access.batch_cipher import decrypt_batch
from edge_gateway.access.kem import get_kem
from edge_gateway.access.key_delivery import FRESHNESS_WINDOW_MS
from edge_gateway.access.key_delivery import KeyEnvelope
from edge_gateway.access.key_delivery import deliver_key
from edge_gateway.access.key_delivery import open_envelope
from edge_gateway.ledger.chain import Chain
from edge_gateway.ledger.sidechain import SideChainEntry
from edge_gateway.ledger.sidechain import SideChainStore
from edge_gateway.market.escrow import EscrowAccount
from edge_gateway.market.escrow import check_units
from edge_gateway.market.records import CONFIRMED
from edge_gateway.market.records import DISPUTED
from edge_gateway.market.records import FINALIZED
from edge_gateway.market.records import KEY_DELIVERED
from edge_gateway.market.records import REFUNDED
from edge_gateway.market.records import REQUESTED
from edge_gateway.market.records import TERMINAL_STATES
from edge_gateway.market.records import BatchListing
from edge_gateway.market.records import Deal
from edge_gateway.market.records import DeviceRegistration
from edge_gateway.market.records import check_transition
from edge_gateway.market.storage import StorageProvider
from edge_gateway.utils.errors import AuthorizationError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import IdempotencyError
from edge_gateway.utils.errors import InsufficientBalanceError
from edge_gateway.utils.errors import IntegrityError
from edge_gateway.utils.errors import NotFoundError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import TransitionError
from edge_gateway.utils.serialization import canonical_bytes
from edge_gateway.utils.serialization import sha256
from edge_gateway.utils.serialization import to_canonical

DATA_TYPE_PREFIX = "market/"
CONFIRM_TIMEOUT_ROUNDS = 3


class DataMarket:
    """Registration, listing, escrowed deals, key delivery and disputes.

    Writers are serialized by one lock. Queries return copies.

    Args:
        chain: `Chain` the operation records are appended to. May be shared
            with other writers, blocks of other data types are ignored.
        storage: `StorageProvider` holding the encrypted payloads.
        sidechain: `SideChainStore` receiving an entry per listing block.
        confirm_timeout_rounds: int. Settlement passes after which a
            requested deal that still fails its deposit condition is
            refunded.
        freshness_window: int. Largest accepted key-request age in ms.
    """

    def __init__(
        self,
        chain=None,
        storage=None,
        sidechain=None,
        confirm_timeout_rounds=CONFIRM_TIMEOUT_ROUNDS,
        freshness_window=FRESHNESS_WINDOW_MS,
    ):
        if confirm_timeout_rounds < 1:
            raise ParameterError(
                "`confirm_timeout_rounds` must be >= 1. "
                f"Received: confirm_timeout_rounds={confirm_timeout_rounds}"
            )
        self.chain = chain if chain is not None else Chain()
        self.storage = storage if storage is not None else StorageProvider()
        if sidechain is None:
            sidechain = SideChainStore()
        self.sidechain = sidechain
        self.confirm_timeout_rounds = confirm_timeout_rounds
        self.freshness_window = freshness_window
        self.escrow = EscrowAccount()
        self.devices = {}
        self.listings = {}
        self.deals = {}
        self.envelopes = {}
        self.round = 0
        self._lock = threading.RLock()

    # Record plumbing.

    def _commit(self, op, timestamp, **fields):
        if timestamp is None:
            timestamp = self.chain.tip.timestamp
        record = dict(fields, op=op)
        body = canonical_bytes(record)
        block = self.chain.add(body, DATA_TYPE_PREFIX + op, int(timestamp))
        self._apply(json.loads(body))
        logging.vlog(1, "Market %s committed at height %d.", op, block.height)
        return block

    def _apply(self, record):
        handler = getattr(self, "_apply_" + str(record.get("op")), None)
        if handler is None:
            raise FormatError(f"Unknown market operation {record.get('op')!r}.")
        try:
            handler(record)
        except (KeyError, TypeError) as e:
            raise FormatError(f"Malformed {record['op']} record: {e}")

    def _move(self, deal_id, target):
        deal = self.deals[deal_id]
        check_transition(deal, target)
        self.deals[deal_id] = dataclasses.replace(deal, state=target)

    def _apply_register_device(self, record):
        registration = DeviceRegistration.from_dict(record["registration"])
        self.escrow.open(registration.device_id, int(record["balance"]))
        self.devices[registration.device_id] = registration

    def _apply_list_batch(self, record):
        listing = BatchListing.from_dict(record["listing"])
        self.listings[listing.batch_id] = listing

    def _apply_request_deal(self, record):
        deal = Deal.from_dict(record["deal"])
        self.escrow.lock(deal.buyer_id, deal.deal_id, deal.deposit)
        self.deals[deal.deal_id] = deal

    def _apply_settle(self, record):
        self.round = int(record["round"])

    def _apply_confirm_deal(self, record):
        self._move(record["deal_id"], CONFIRMED)

    def _apply_expire_deal(self, record):
        deal = self.deals[record["deal_id"]]
        self._move(deal.deal_id, REFUNDED)
        self.escrow.release(deal.deal_id, deal.buyer_id)

    def _apply_deliver_deal_key(self, record):
        envelope = KeyEnvelope.from_dict(record["envelope"])
        self._move(record["deal_id"], KEY_DELIVERED)
        self.envelopes[record["deal_id"]] = envelope

    def _apply_finalize(self, record):
        deal = self.deals[record["deal_id"]]
        if record["satisfied"]:
            self._move(deal.deal_id, FINALIZED)
            self.escrow.release(deal.deal_id, deal.seller_id)
        else:
            self._move(deal.deal_id, DISPUTED)

    def _apply_resolve_dispute(self, record):
        deal = self.deals[record["deal_id"]]
        outcome = record["outcome"]
        self._move(deal.deal_id, outcome)
        payee = deal.seller_id if outcome == FINALIZED else deal.buyer_id
        self.escrow.release(deal.deal_id, payee)

    # Lookups.

    def _device(self, device_id, role):
        if device_id not in self.devices:
            raise AuthorizationError(
                f"{role.capitalize()} {device_id!r} is not registered."
            )
        return self.devices[device_id]

    def get_listing(self, batch_id):
        if batch_id not in self.listings:
            raise NotFoundError(f"No listing for batch {batch_id!r}.")
        return self.listings[batch_id]

    def get_deal(self, deal_id):
        if deal_id not in self.deals:
            raise NotFoundError(f"No deal {deal_id!r}.")
        return self.deals[deal_id]

    def query_listings(self, data_type=None):
        """Listings of `data_type`, or all listings, in listing order."""
        return [
            listing
            for listing in list(self.listings.values())
            if data_type is None or listing.data_type == data_type
        ]

    def open_deals(self):
        return [
            deal
            for deal in list(self.deals.values())
            if deal.state not in TERMINAL_STATES
        ]

    def state(self):
        """Canonical snapshot of everything the ledger records."""
        with self._lock:
            return to_canonical(
                {
                    "round": self.round,
                    "devices": self.devices,
                    "listings": self.listings,
                    "deals": self.deals,
                    "envelopes": self.envelopes,
                    "escrow": self.escrow.snapshot(),
                }
            )

    # Protocol operations.

    def register_device(self, registration, balance=0, timestamp=None):
        """Admit a participant and open its account with `balance` units.

        Raises:
            FormatError: the registration carries malformed keys.
            IdempotencyError: the device id is taken.
        """
        registration.validate()
        check_units(balance, "balance")
        with self._lock:
            if registration.device_id in self.devices:
                raise IdempotencyError(
                    f"Device {registration.device_id!r} is already "
                    "registered."
                )
            self._commit(
                "register_device",
                timestamp,
                registration=registration.to_dict(),
                balance=balance,
            )
        return registration

    def list_batch(
        self,
        owner_id,
        batch,
        min_deposit=0,
        expected_digest=None,
        timestamp=None,
    ):
        """Store an `EncryptedBatch` and publish its hash and metadata.

        Args:
            owner_id: string. Registered id of the selling device.
            batch: `EncryptedBatch` produced by the access module.
            min_deposit: int. Smallest deposit that confirms a deal.
            expected_digest: optional bytes. Digest the stored payload must
                hash to.
            timestamp: int. Block time in ms, defaults to the tip's.

        Raises:
            AuthorizationError: the owner is not registered.
            IntegrityError: the payload does not hash to `expected_digest`.
        """
        if not isinstance(batch, EncryptedBatch):
            raise ParameterError(
                "`batch` must be an `EncryptedBatch`. "
                f"Received: batch={type(batch).__name__}"
            )
        check_units(min_deposit, "min_deposit")
        with self._lock:
            self._device(owner_id, "owner")
            if batch.batch_id in self.listings:
                raise IdempotencyError(
                    f"Batch {batch.batch_id!r} is already listed."
                )
            payload = batch.to_json().encode("utf-8")
            digest = self.storage.put(payload, expected_digest)
            created_at = (
                self.chain.tip.timestamp if timestamp is None else timestamp
            )
            listing = BatchListing(
                batch_id=batch.batch_id,
                owner_id=owner_id,
                data_type=batch.data_type,
                size=len(payload),
                created_at=int(created_at),
                payload_digest=digest,
                min_deposit=min_deposit,
            )
            block = self._commit(
                "list_batch", created_at, listing=listing.to_dict()
            )
            self.sidechain.record(
                SideChainEntry(
                    block_hash=block.block_hash,
                    batch_id=listing.batch_id,
                    data_type=listing.data_type,
                    size=listing.size,
                    owner_id=owner_id,
                    timestamp=listing.created_at,
                )
            )
        return listing

    def request_deal(self, buyer_id, batch_id, deposit, timestamp=None):
        """Open a deal and lock `deposit` units of the buyer in escrow.

        Raises:
            AuthorizationError: the buyer is not registered.
            NotFoundError: the batch is not listed.
            InsufficientBalanceError: the buyer cannot cover `deposit`.
        """
        check_units(deposit, "deposit")
        with self._lock:
            self._device(buyer_id, "buyer")
            listing = self.get_listing(batch_id)
            balance = self.escrow.balance(buyer_id)
            if balance < deposit:
                raise InsufficientBalanceError(
                    f"{buyer_id!r} holds {balance} units, deposit is "
                    f"{deposit}."
                )
            deal = Deal(
                deal_id=f"deal-{len(self.deals):06d}",
                batch_id=batch_id,
                buyer_id=buyer_id,
                seller_id=listing.owner_id,
                deposit=deposit,
                requested_round=self.round,
            )
            self._commit("request_deal", timestamp, deal=deal.to_dict())
            return self.deals[deal.deal_id]

    def confirm_deal(self, deal_id, timestamp=None):
        """Confirm a requested deal whose deposit meets the batch condition.

        Returns:
            The deal's state afterwards, `"confirmed"` or `"requested"`.

        Raises:
            TransitionError: the deal is not in the requested state.
        """
        with self._lock:
            deal = self.get_deal(deal_id)
            if deal.state != REQUESTED:
                raise TransitionError(
                    f"Deal {deal_id} is {deal.state}, only requested deals "
                    "can be confirmed."
                )
            if deal.deposit < self.listings[deal.batch_id].min_deposit:
                return deal.state
            self._commit("confirm_deal", timestamp, deal_id=deal_id)
            return CONFIRMED

    def settle(self, timestamp=None):
        """Run one settlement pass.

        Advances the round, confirms every requested deal whose deposit
        meets its condition and refunds those that stayed unconfirmed for
        `confirm_timeout_rounds` passes.

        Returns:
            A dict of deal id to new state for the deals that moved.
        """
        changes = {}
        with self._lock:
            self._commit("settle", timestamp, round=self.round + 1)
            for deal in list(self.deals.values()):
                if deal.state != REQUESTED:
                    continue
                if self.confirm_deal(deal.deal_id, timestamp) == CONFIRMED:
                    changes[deal.deal_id] = CONFIRMED
                elif (
                    self.round - deal.requested_round
                    >= self.confirm_timeout_rounds
                ):
                    self._commit("expire_deal", timestamp, deal_id=deal.deal_id)
                    changes[deal.deal_id] = REFUNDED
        logging.vlog(1, "Settlement round %d moved %s.", self.round, changes)
        return changes

    def deliver_deal_key(
        self,
        deal_id,
        request,
        batch_key,
        owner_signing_keys,
        now=None,
        entropy=None,
        timestamp=None,
    ):
        """Answer the buyer's signed key request of a confirmed deal.

        Returns:
            The `KeyEnvelope`, also recorded on the ledger.

        Raises:
            TransitionError: the deal is not confirmed.
            AuthorizationError: the request or the signing keys do not
                belong to the deal's buyer and seller. `SignatureError` and
                `FreshnessError` from the key delivery are subclasses.
        """
        with self._lock:
            deal = self.get_deal(deal_id)
            check_transition(deal, KEY_DELIVERED)
            if (
                request.requester_id != deal.buyer_id
                or request.batch_id != deal.batch_id
            ):
                raise AuthorizationError(
                    f"Request of {request.requester_id!r} for batch "
                    f"{request.batch_id!r} does not match deal {deal_id}."
                )
            seller = self.devices[deal.seller_id]
            if owner_signing_keys.public_key != seller.verification_key:
                raise AuthorizationError(
                    f"Envelope keys are not registered to {deal.seller_id!r}."
                )
            buyer = self.devices[deal.buyer_id]
            envelope = deliver_key(
                request,
                buyer.verification_key,
                buyer.kem_public_key,
                batch_key,
                owner_signing_keys,
                kem=get_kem(buyer.kem_algorithm),
                now=now,
                freshness_window=self.freshness_window,
                entropy=entropy,
            )
            self._commit(
                "deliver_deal_key",
                timestamp,
                deal_id=deal_id,
                envelope=envelope.to_dict(),
            )
        return envelope

    def finalize(self, deal_id, buyer_satisfied, timestamp=None):
        """Close a delivered deal, or open a dispute if the buyer objects.

        Returns:
            `"finalized"` or `"disputed"`.
        """
        with self._lock:
            deal = self.get_deal(deal_id)
            if deal.state != KEY_DELIVERED:
                raise TransitionError(
                    f"Deal {deal_id} is {deal.state}, only deals with a "
                    "delivered key can be finalized."
                )
            self._commit(
                "finalize",
                timestamp,
                deal_id=deal_id,
                satisfied=bool(buyer_satisfied),
            )
            return self.deals[deal_id].state

    def resolve_dispute(self, deal_id, timestamp=None):
        """Settle a dispute by re-hashing the stored payload.

        A payload that no longer matches the listed digest refunds the
        buyer, a matching one pays the seller.

        Raises:
            TransitionError: the deal is not disputed.
            StorageError: the payload is unavailable. The deal stays
                disputed.
        """
        with self._lock:
            deal = self.get_deal(deal_id)
            if deal.state != DISPUTED:
                raise TransitionError(
                    f"Deal {deal_id} is {deal.state}, only disputed deals "
                    "can be resolved."
                )
            listing = self.listings[deal.batch_id]
            digest = sha256(self.storage.get(listing.payload_digest))
            outcome = (
                FINALIZED if digest == listing.payload_digest else REFUNDED
            )
            self._commit(
                "resolve_dispute",
                timestamp,
                deal_id=deal_id,
                payload_digest=digest,
                outcome=outcome,
            )
        logging.info("Dispute over %s resolved as %s.", deal_id, outcome)
        return outcome

    def open_deal(self, deal_id, kem_secret_key):
        """Buyer side of a delivered deal: recover the batch plaintext.

        Raises:
            TransitionError: no key was delivered for the deal.
            IntegrityError: the stored payload does not match the listing.
            AuthenticationError: decryption failed.
        """
        deal = self.get_deal(deal_id)
        if deal_id not in self.envelopes:
            raise TransitionError(f"No key was delivered for deal {deal_id}.")
        listing = self.listings[deal.batch_id]
        batch_key = open_envelope(
            self.envelopes[deal_id],
            kem_secret_key,
            self.devices[deal.seller_id].verification_key,
        )
        payload = self.storage.get(listing.payload_digest)
        if sha256(payload) != listing.payload_digest:
            raise IntegrityError(
                f"Stored payload of batch {deal.batch_id!r} does not match "
                "its listing."
            )
        batch = EncryptedBatch.from_dict(json.loads(payload))
        return decrypt_batch(batch_key, batch)

    def trace(self):
        """The operation records on the chain, oldest first."""
        records = []
        for block in self.chain:
            if block.header.data_type.startswith(DATA_TYPE_PREFIX):
                record = json.loads(block.body)
                record["height"] = block.height
                record["timestamp"] = block.timestamp
                records.append(record)
        return records

    @classmethod
    def replay(cls, chain, storage=None, **kwargs):
        """Rebuild a market by applying the market records of `chain`.

        The chain is verified first. The returned market writes to a copy
        of `chain`.
        """
        chain.verify()
        market = cls(chain=Chain.from_blocks(chain), storage=storage, **kwargs)
        for block in list(chain)[1:]:
            if not block.header.data_type.startswith(DATA_TYPE_PREFIX):
                continue
            try:
                record = json.loads(block.body)
            except ValueError as e:
                raise FormatError(
                    f"Block {block.height} is not a market record: {e}"
                )
            market._apply(record)
        return market
