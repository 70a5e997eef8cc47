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
"""Participants, listings and deals of the data market."""

import dataclasses

from edge_gateway.access.kem import KEMS
from edge_gateway.access.signatures import SIGNATURE_SCHEMES
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import TransitionError
from edge_gateway.utils.serialization import to_canonical

REQUESTED = "requested"
CONFIRMED = "confirmed"
KEY_DELIVERED = "key_delivered"
FINALIZED = "finalized"
DISPUTED = "disputed"
REFUNDED = "refunded"

DEAL_STATES = (
    REQUESTED,
    CONFIRMED,
    KEY_DELIVERED,
    FINALIZED,
    DISPUTED,
    REFUNDED,
)
TERMINAL_STATES = (FINALIZED, REFUNDED)
# A requested deal is refunded when it expires unconfirmed.
TRANSITIONS = {
    REQUESTED: (CONFIRMED, REFUNDED),
    CONFIRMED: (KEY_DELIVERED,),
    KEY_DELIVERED: (FINALIZED, DISPUTED),
    DISPUTED: (REFUNDED, FINALIZED),
    FINALIZED: (),
    REFUNDED: (),
}
# Raw public key lengths of the fixed-size schemes.
PUBLIC_KEY_SIZES = {
    "Ed25519": 32,
    "X25519-HKDF-SHA256": 32,
}


def check_transition(deal, target):
    """Raise `TransitionError` unless `deal` may move to `target`."""
    if target not in TRANSITIONS[deal.state]:
        raise TransitionError(
            f"Deal {deal.deal_id} cannot move from {deal.state} to {target}."
        )


def _check_public_key(key, algorithm, registry, name):
    if algorithm not in registry:
        raise FormatError(
            f"`{name}` uses unknown algorithm {algorithm!r}. "
            f"Expected one of {sorted(registry)}."
        )
    if not isinstance(key, bytes) or not key:
        raise FormatError(f"`{name}` must be non-empty bytes.")
    size = PUBLIC_KEY_SIZES.get(algorithm)
    if size is not None and len(key) != size:
        raise FormatError(
            f"`{name}` must be {size} bytes for {algorithm}. "
            f"Received: length {len(key)}"
        )


@dataclasses.dataclass(frozen=True)
class DeviceRegistration:
    """A market participant and its public key material.

    Args:
        device_id: string. Unique across the network.
        owner_id: string. The gateway the device belongs to.
        verification_key: bytes. Signature public key.
        signature_algorithm: string. Registered signature scheme id.
        kem_public_key: bytes. KEM public key used for key delivery.
        kem_algorithm: string. Registered KEM id.
        registered_at: int. Registration time in ms.
    """

    device_id: str
    owner_id: str
    verification_key: bytes
    signature_algorithm: str
    kem_public_key: bytes
    kem_algorithm: str
    registered_at: int = 0

    def validate(self):
        if not isinstance(self.device_id, str) or not self.device_id:
            raise FormatError(
                "`device_id` must be a non-empty string. "
                f"Received: device_id={self.device_id!r}"
            )
        _check_public_key(
            self.verification_key,
            self.signature_algorithm,
            SIGNATURE_SCHEMES,
            "verification_key",
        )
        _check_public_key(
            self.kem_public_key, self.kem_algorithm, KEMS, "kem_public_key"
        )

    def to_dict(self):
        return to_canonical(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                device_id=str(config["device_id"]),
                owner_id=str(config["owner_id"]),
                verification_key=bytes.fromhex(config["verification_key"]),
                signature_algorithm=str(config["signature_algorithm"]),
                kem_public_key=bytes.fromhex(config["kem_public_key"]),
                kem_algorithm=str(config["kem_algorithm"]),
                registered_at=int(config["registered_at"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed device registration: {e}")


@dataclasses.dataclass(frozen=True)
class BatchListing:
    """Hash and metadata of a stored encrypted batch."""

    batch_id: str
    owner_id: str
    data_type: str
    size: int
    created_at: int
    payload_digest: bytes
    min_deposit: int

    def to_dict(self):
        return to_canonical(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                batch_id=str(config["batch_id"]),
                owner_id=str(config["owner_id"]),
                data_type=str(config["data_type"]),
                size=int(config["size"]),
                created_at=int(config["created_at"]),
                payload_digest=bytes.fromhex(config["payload_digest"]),
                min_deposit=int(config["min_deposit"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed batch listing: {e}")


@dataclasses.dataclass(frozen=True)
class Deal:
    deal_id: str
    batch_id: str
    buyer_id: str
    seller_id: str
    deposit: int
    requested_round: int
    state: str = REQUESTED

    def to_dict(self):
        return to_canonical(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                deal_id=str(config["deal_id"]),
                batch_id=str(config["batch_id"]),
                buyer_id=str(config["buyer_id"]),
                seller_id=str(config["seller_id"]),
                deposit=int(config["deposit"]),
                requested_round=int(config["requested_round"]),
                state=str(config.get("state", REQUESTED)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed deal: {e}")
