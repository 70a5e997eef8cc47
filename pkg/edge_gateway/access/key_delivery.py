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
"""Signed key requests and KEM-wrapped batch key delivery.

A buyer signs a `KeyRequest` for a batch. The data owner checks the
signature and freshness, encapsulates a fresh secret to the buyer's KEM
public key, wraps the batch key under it and signs the resulting
`KeyEnvelope`. The buyer verifies the owner's signature, decapsulates and
unwraps.
"""

import dataclasses
import time

from absl import logging
from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from edge_gateway.access.kem import get_kem
from edge_gateway.access.signatures import get_signature_scheme
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import FreshnessError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import SignatureError
from edge_gateway.utils.errors import UnwrapError
from edge_gateway.utils.serialization import canonical_bytes
from edge_gateway.utils.serialization import canonical_json
from edge_gateway.utils.serialization import to_canonical

FRESHNESS_WINDOW_MS = 60_000
# Every KEM shared secret wraps exactly one key, so a constant nonce is safe.
_WRAP_NONCE = bytes(12)


def now_ms():
    return int(time.time() * 1000)


@dataclasses.dataclass(frozen=True)
class KeyRequest:
    requester_id: str
    batch_id: str
    timestamp: int
    signature_algorithm: str
    signature: bytes = b""

    def signed_payload(self):
        return canonical_bytes(
            {
                "batch_id": self.batch_id,
                "requester_id": self.requester_id,
                "signature_algorithm": self.signature_algorithm,
                "timestamp": self.timestamp,
            }
        )

    def to_dict(self):
        return to_canonical(self)

    def to_json(self):
        return canonical_json(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                requester_id=str(config["requester_id"]),
                batch_id=str(config["batch_id"]),
                timestamp=int(config["timestamp"]),
                signature_algorithm=str(config["signature_algorithm"]),
                signature=bytes.fromhex(config["signature"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed key request: {e}")


@dataclasses.dataclass(frozen=True)
class KeyEnvelope:
    batch_id: str
    requester_id: str
    kem_algorithm: str
    kem_ciphertext: bytes
    wrapped_batch_key: bytes
    request_signature: bytes
    signature_algorithm: str
    signature: bytes = b""

    def signed_payload(self):
        fields = to_canonical(self)
        del fields["signature"]
        return canonical_bytes(fields)

    def to_dict(self):
        return to_canonical(self)

    def to_json(self):
        return canonical_json(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                batch_id=str(config["batch_id"]),
                requester_id=str(config["requester_id"]),
                kem_algorithm=str(config["kem_algorithm"]),
                kem_ciphertext=bytes.fromhex(config["kem_ciphertext"]),
                wrapped_batch_key=bytes.fromhex(config["wrapped_batch_key"]),
                request_signature=bytes.fromhex(config["request_signature"]),
                signature_algorithm=str(config["signature_algorithm"]),
                signature=bytes.fromhex(config["signature"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed key envelope: {e}")


def _wrap_context(batch_id, requester_id):
    return canonical_bytes({"batch_id": batch_id, "requester_id": requester_id})


def request_key(signing_keys, requester_id, batch_id, timestamp=None):
    """Build and sign a `KeyRequest`.

    Args:
        signing_keys: `SigningKeyPair` of the requester.
        requester_id: string. The requester's registered identifier.
        batch_id: string. The batch whose key is requested.
        timestamp: int. Request time in ms since the epoch, defaults to now.
    """
    request = KeyRequest(
        requester_id=requester_id,
        batch_id=batch_id,
        timestamp=now_ms() if timestamp is None else int(timestamp),
        signature_algorithm=signing_keys.algorithm_id,
    )
    signature = signing_keys.sign(request.signed_payload())
    return dataclasses.replace(request, signature=signature)


def verify_request(request, verification_key):
    """Whether `request` carries a valid signature by `verification_key`."""
    try:
        scheme = get_signature_scheme(request.signature_algorithm)
    except ParameterError:
        return False
    return scheme.verify(
        verification_key, request.signed_payload(), request.signature
    )


def deliver_key(
    request,
    requester_verification_key,
    requester_kem_public_key,
    batch_key,
    owner_signing_keys,
    kem=None,
    now=None,
    freshness_window=FRESHNESS_WINDOW_MS,
    entropy=None,
):
    """Answer an authorized, fresh key request with a `KeyEnvelope`.

    Args:
        request: the buyer's `KeyRequest`.
        requester_verification_key: bytes. The buyer's registered signature
            public key.
        requester_kem_public_key: bytes. The buyer's KEM public key.
        batch_key: bytes. The child key of the requested batch.
        owner_signing_keys: `SigningKeyPair` of the data owner.
        kem: `KEM` instance, defaults to `X25519Kem`.
        now: int. Current time in ms, defaults to the wall clock.
        freshness_window: int. Largest accepted clock distance in ms.
        entropy: optional bytes. Encapsulation randomness for KEMs that
            accept it.

    Raises:
        SignatureError: the request signature does not verify.
        FreshnessError: the request is older, or further in the future,
            than `freshness_window`.
    """
    if not verify_request(request, requester_verification_key):
        raise SignatureError(
            f"Key request of {request.requester_id!r} for batch "
            f"{request.batch_id!r} has an invalid signature."
        )
    now = now_ms() if now is None else int(now)
    if abs(now - request.timestamp) > freshness_window:
        raise FreshnessError(
            f"Key request is {now - request.timestamp} ms old, outside the "
            f"{freshness_window} ms freshness window."
        )
    kem = kem or get_kem()
    kem_ciphertext, shared_secret = kem.encapsulate(
        requester_kem_public_key, entropy=entropy
    )
    wrapped = ChaCha20Poly1305(shared_secret).encrypt(
        _WRAP_NONCE,
        bytes(batch_key),
        _wrap_context(request.batch_id, request.requester_id),
    )
    envelope = KeyEnvelope(
        batch_id=request.batch_id,
        requester_id=request.requester_id,
        kem_algorithm=kem.algorithm_id,
        kem_ciphertext=kem_ciphertext,
        wrapped_batch_key=wrapped,
        request_signature=request.signature,
        signature_algorithm=owner_signing_keys.algorithm_id,
    )
    signature = owner_signing_keys.sign(envelope.signed_payload())
    logging.vlog(
        1,
        "Delivered key of batch %s to %s.",
        request.batch_id,
        request.requester_id,
    )
    return dataclasses.replace(envelope, signature=signature)


def open_envelope(envelope, kem_secret_key, owner_verification_key):
    """Recover the batch key from a `KeyEnvelope`.

    The owner signature is checked before any decryption.

    Raises:
        SignatureError: the envelope is not signed by the owner.
        DecapsulationError: the KEM ciphertext is invalid.
        UnwrapError: the wrapped key fails authentication, for example
            because the envelope was built for another KEM key.
    """
    try:
        scheme = get_signature_scheme(envelope.signature_algorithm)
    except ParameterError as e:
        raise SignatureError(str(e))
    if not scheme.verify(
        owner_verification_key, envelope.signed_payload(), envelope.signature
    ):
        raise SignatureError(
            f"Envelope for batch {envelope.batch_id!r} has an invalid "
            "owner signature."
        )
    kem = get_kem(envelope.kem_algorithm)
    shared_secret = kem.decapsulate(kem_secret_key, envelope.kem_ciphertext)
    try:
        return ChaCha20Poly1305(shared_secret).decrypt(
            _WRAP_NONCE,
            envelope.wrapped_batch_key,
            _wrap_context(envelope.batch_id, envelope.requester_id),
        )
    except InvalidTag:
        raise UnwrapError(
            f"Could not unwrap the key of batch {envelope.batch_id!r}."
        )
