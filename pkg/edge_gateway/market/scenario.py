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
"""Scripted and seeded-random runs of the data market."""

import dataclasses
import json

import numpy as np
from absl import logging

from edge_gateway.access.batch_cipher import NONCE_SIZE
from edge_gateway.access.batch_cipher import encrypt_batch
from edge_gateway.access.kem import X25519Kem
from edge_gateway.access.key_delivery import request_key
from edge_gateway.access.key_ring import KeyRing
from edge_gateway.access.signatures import Ed25519Signature
from edge_gateway.market.data_market import CONFIRM_TIMEOUT_ROUNDS
from edge_gateway.market.data_market import DataMarket
from edge_gateway.market.records import CONFIRMED
from edge_gateway.market.records import DISPUTED
from edge_gateway.market.records import KEY_DELIVERED
from edge_gateway.market.records import DeviceRegistration
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import EdgeGatewayError
from edge_gateway.utils.errors import StateError
from edge_gateway.utils.serialization import canonical_json
from edge_gateway.utils.serialization import derive_secret

STEP_MS = 1000
OPERATIONS = (
    "request_deal",
    "settle",
    "confirm_deal",
    "deliver_deal_key",
    "finalize",
    "resolve_dispute",
    "tamper",
)
RANDOM_WEIGHTS = (0.3, 0.2, 0.1, 0.15, 0.15, 0.05, 0.05)
UNREGISTERED = "intruder"


@dataclasses.dataclass(frozen=True)
class Scenario:
    """Participants, batches and the operations to run on a market.

    Args:
        participants: dict of device id to opening balance.
        batches: tuple of dicts with `batch_id`, `owner`, and optionally
            `data_type`, `size` (plaintext bytes) and `min_deposit`.
        operations: tuple of operation dicts run in order. Each has an
            `op` from `OPERATIONS` plus its arguments, for example
            `{"op": "request_deal", "buyer": "b", "batch_id": "x",
            "deposit": 10}`.
        random_operations: int. Seeded random operations run after the
            scripted ones.
        seed: int. Fixes keys, payloads, nonces and random draws.
        confirm_timeout_rounds: int. Passed to the market.
    """

    participants: dict
    batches: tuple = ()
    operations: tuple = ()
    random_operations: int = 0
    seed: int = 0
    confirm_timeout_rounds: int = CONFIRM_TIMEOUT_ROUNDS

    def __post_init__(self):
        if not self.participants:
            raise ConfigError("A scenario needs at least one participant.")
        for batch in self.batches:
            if batch.get("owner") not in self.participants:
                raise ConfigError(
                    f"Batch {batch.get('batch_id')!r} is owned by an unknown "
                    f"participant {batch.get('owner')!r}."
                )
        for operation in self.operations:
            if operation.get("op") not in OPERATIONS:
                raise ConfigError(
                    f"Unknown operation {operation.get('op')!r}. "
                    f"Expected one of {OPERATIONS}."
                )

    def get_config(self):
        return {
            "participants": dict(self.participants),
            "batches": [dict(b) for b in self.batches],
            "operations": [dict(o) for o in self.operations],
            "random_operations": self.random_operations,
            "seed": self.seed,
            "confirm_timeout_rounds": self.confirm_timeout_rounds,
        }

    @classmethod
    def from_config(cls, config):
        config = dict(config)
        config["batches"] = tuple(config.get("batches", ()))
        config["operations"] = tuple(config.get("operations", ()))
        try:
            return cls(**config)
        except TypeError as e:
            raise ConfigError(f"Invalid scenario config: {e}")

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path} is not valid JSON: {e}")
        return cls.from_config(config)

    @classmethod
    def random(
        cls,
        seed,
        num_participants=4,
        num_batches=3,
        num_operations=30,
    ):
        """A scenario of seeded random balances, batches and operations."""
        rng = np.random.default_rng(seed)
        participants = {
            f"device-{i}": int(rng.integers(0, 100))
            for i in range(num_participants)
        }
        batches = tuple(
            {
                "batch_id": f"batch-{i}",
                "owner": f"device-{int(rng.integers(num_participants))}",
                "size": int(rng.integers(16, 256)),
                "min_deposit": int(rng.integers(0, 30)),
            }
            for i in range(num_batches)
        )
        return cls(
            participants=participants,
            batches=batches,
            random_operations=num_operations,
            seed=seed,
        )


@dataclasses.dataclass
class Participant:
    device_id: str
    key_ring: KeyRing
    signing_keys: object
    kem_keys: object


@dataclasses.dataclass
class ScenarioResult:
    """The market after a run and one event per attempted operation."""

    market: DataMarket
    events: list

    @property
    def rejected(self):
        return [event for event in self.events if not event["accepted"]]

    def write_trace(self, path):
        """Write the events as newline-delimited canonical JSON."""
        with open(path, "w", encoding="utf-8") as f:
            for event in self.events:
                f.write(canonical_json(event) + "\n")


class ScenarioRunner:
    """Drive a `DataMarket` through a `Scenario`.

    The runner plays every participant. Simulated time advances by
    `STEP_MS` per operation, so runs are reproducible from the scenario.
    """

    def __init__(self, scenario, market=None):
        self.scenario = scenario
        self.market = market or DataMarket(
            confirm_timeout_rounds=scenario.confirm_timeout_rounds
        )
        self.rng = np.random.default_rng([scenario.seed, 1])
        self.participants = {}
        self.batch_index = {}
        self.events = []
        self.step = 0

    @property
    def now(self):
        return self.step * STEP_MS

    def participant(self, device_id):
        if device_id not in self.participants:
            seed = self.scenario.seed
            key_ring = KeyRing.create(derive_secret(seed, device_id, "master"))
            self.participants[device_id] = Participant(
                device_id=device_id,
                key_ring=key_ring,
                signing_keys=key_ring.signing_key_pair(Ed25519Signature()),
                kem_keys=X25519Kem().generate_keypair(
                    seed=derive_secret(seed, device_id, "kem")
                ),
            )
        return self.participants[device_id]

    def setup(self):
        for device_id, balance in self.scenario.participants.items():
            keys = self.participant(device_id)
            self.market.register_device(
                DeviceRegistration(
                    device_id=device_id,
                    owner_id=device_id,
                    verification_key=keys.signing_keys.public_key,
                    signature_algorithm=keys.signing_keys.algorithm_id,
                    kem_public_key=keys.kem_keys.public_key,
                    kem_algorithm=keys.kem_keys.algorithm_id,
                    registered_at=self.now,
                ),
                balance=int(balance),
                timestamp=self.now,
            )
        for index, spec in enumerate(self.scenario.batches):
            batch_id = spec["batch_id"]
            owner = self.participant(spec["owner"])
            plaintext = b"".join(
                derive_secret(self.scenario.seed, batch_id, i)
                for i in range(spec.get("size", 64) // 32 + 1)
            )[: spec.get("size", 64)]
            batch = encrypt_batch(
                owner.key_ring.child_key(index),
                plaintext,
                batch_id,
                data_type=spec.get("data_type", "ecg"),
                nonce=derive_secret(self.scenario.seed, batch_id, "nonce")[
                    :NONCE_SIZE
                ],
            )
            self.market.list_batch(
                owner.device_id,
                batch,
                min_deposit=int(spec.get("min_deposit", 0)),
                timestamp=self.now,
            )
            self.batch_index[batch_id] = index

    def satisfied(self, deal_id):
        """Whether the buyer can open and decrypt the delivered batch."""
        deal = self.market.get_deal(deal_id)
        buyer = self.participant(deal.buyer_id)
        try:
            self.market.open_deal(deal_id, buyer.kem_keys.secret_key)
        except EdgeGatewayError:
            return False
        return True

    def _execute(self, operation):
        op = operation["op"]
        market = self.market
        if op == "request_deal":
            return market.request_deal(
                operation["buyer"],
                operation["batch_id"],
                int(operation["deposit"]),
                timestamp=self.now,
            ).deal_id
        if op == "settle":
            return market.settle(timestamp=self.now)
        if op == "confirm_deal":
            return market.confirm_deal(operation["deal_id"], self.now)
        if op == "deliver_deal_key":
            deal = market.get_deal(operation["deal_id"])
            buyer = self.participant(deal.buyer_id)
            seller = self.participant(deal.seller_id)
            request = request_key(
                buyer.signing_keys,
                deal.buyer_id,
                deal.batch_id,
                timestamp=self.now,
            )
            market.deliver_deal_key(
                deal.deal_id,
                request,
                seller.key_ring.child_key(self.batch_index[deal.batch_id]),
                seller.signing_keys,
                now=self.now,
                entropy=derive_secret(self.scenario.seed, deal.deal_id, "kem"),
                timestamp=self.now,
            )
            return KEY_DELIVERED
        if op == "finalize":
            satisfied = operation.get("satisfied")
            if satisfied is None:
                satisfied = self.satisfied(operation["deal_id"])
            return market.finalize(operation["deal_id"], satisfied, self.now)
        if op == "resolve_dispute":
            return market.resolve_dispute(operation["deal_id"], self.now)
        if op == "tamper":
            listing = market.get_listing(operation["batch_id"])
            payload = market.storage.get(listing.payload_digest)
            market.storage.overwrite(
                listing.payload_digest, payload[:-1] + b"\x00"
            )
            return "tampered"
        raise ConfigError(f"Unknown operation {op!r}.")

    def run_operation(self, operation):
        """Attempt `operation` and record an event, rejected or not."""
        self.step += 1
        event = {"step": self.step, "operation": dict(operation)}
        try:
            event["result"] = self._execute(operation)
            event["accepted"] = True
        except EdgeGatewayError as e:
            event["accepted"] = False
            event["error"] = type(e).__name__
        self.events.append(event)
        return event

    def random_operation(self):
        rng = self.rng
        op = OPERATIONS[rng.choice(len(OPERATIONS), p=RANDOM_WEIGHTS)]
        deal_ids = sorted(self.market.deals) + ["deal-missing"]
        deal_id = deal_ids[int(rng.integers(len(deal_ids)))]
        batch_ids = sorted(self.market.listings)
        if op == "request_deal":
            buyers = sorted(self.scenario.participants) + [UNREGISTERED]
            batch_ids = batch_ids + ["batch-missing"]
            buyer = buyers[int(rng.integers(len(buyers)))]
            return {
                "op": op,
                "buyer": buyer,
                "batch_id": batch_ids[int(rng.integers(len(batch_ids)))],
                "deposit": int(rng.integers(0, 40)),
            }
        if op == "settle":
            return {"op": op}
        if op == "tamper":
            if not batch_ids:
                return {"op": "settle"}
            return {
                "op": op,
                "batch_id": batch_ids[int(rng.integers(len(batch_ids)))],
            }
        if op == "finalize" and rng.random() < 0.3:
            return {"op": op, "deal_id": deal_id, "satisfied": False}
        return {"op": op, "deal_id": deal_id}

    def quiesce(self, max_passes=None):
        """Let every participant act until all deals are closed.

        Raises:
            StateError: deals are still open after `max_passes` passes.
        """
        if max_passes is None:
            max_passes = self.scenario.confirm_timeout_rounds + 3
        for _ in range(max_passes):
            if not self.market.open_deals():
                return
            self.run_operation({"op": "settle"})
            for deal in self.market.open_deals():
                if deal.state == CONFIRMED:
                    self.run_operation(
                        {"op": "deliver_deal_key", "deal_id": deal.deal_id}
                    )
            for deal in self.market.open_deals():
                if deal.state == KEY_DELIVERED:
                    self.run_operation(
                        {"op": "finalize", "deal_id": deal.deal_id}
                    )
            for deal in self.market.open_deals():
                if deal.state == DISPUTED:
                    self.run_operation(
                        {"op": "resolve_dispute", "deal_id": deal.deal_id}
                    )
        if self.market.open_deals():
            raise StateError(
                f"{len(self.market.open_deals())} deals still open after "
                f"{max_passes} settlement passes."
            )

    def run(self, quiesce=True):
        self.setup()
        for operation in self.scenario.operations:
            self.run_operation(operation)
        for _ in range(self.scenario.random_operations):
            self.run_operation(self.random_operation())
        if quiesce:
            self.quiesce()
        logging.info(
            "Scenario finished after %d operations, %d rejected.",
            len(self.events),
            sum(not event["accepted"] for event in self.events),
        )
        return ScenarioResult(market=self.market, events=self.events)


def run_scenario(scenario, quiesce=True):
    """Run `scenario` on a fresh market and return a `ScenarioResult`."""
    return ScenarioRunner(scenario).run(quiesce=quiesce)
