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
"""Authenticated encryption of data batches with ChaCha20-Poly1305."""

import dataclasses
import os

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from edge_gateway.utils.errors import AuthenticationError
from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import DIGEST_SIZE
from edge_gateway.utils.serialization import canonical_bytes
from edge_gateway.utils.serialization import canonical_json
from edge_gateway.utils.serialization import sha256

KEY_SIZE = 32
NONCE_SIZE = 12


@dataclasses.dataclass(frozen=True)
class EncryptedBatch:
    batch_id: str
    nonce: bytes
    ciphertext: bytes
    plaintext_digest: bytes
    data_type: str

    def associated_data(self):
        """Bytes authenticated alongside the ciphertext."""
        return canonical_bytes(
            {
                "batch_id": self.batch_id,
                "data_type": self.data_type,
                "plaintext_digest": self.plaintext_digest,
            }
        )

    def to_json(self):
        return canonical_json(self)

    @classmethod
    def from_dict(cls, config):
        try:
            return cls(
                batch_id=str(config["batch_id"]),
                nonce=bytes.fromhex(config["nonce"]),
                ciphertext=bytes.fromhex(config["ciphertext"]),
                plaintext_digest=bytes.fromhex(config["plaintext_digest"]),
                data_type=str(config["data_type"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed encrypted batch: {e}")


def _check_key(key):
    if not isinstance(key, (bytes, bytearray)) or len(key) != KEY_SIZE:
        raise ParameterError(f"`key` must be a {KEY_SIZE}-byte string.")


def encrypt_batch(key, plaintext, batch_id, data_type="ecg", nonce=None):
    """Encrypt one batch under its child key.

    The batch id, data type and plaintext digest are authenticated as
    associated data, so tampering with any of them fails decryption.

    Args:
        key: 32-byte child key.
        plaintext: non-empty bytes.
        batch_id: string. Identifier of the batch.
        data_type: string. Tag of the payload kind.
        nonce: optional 12 bytes. Drawn from `os.urandom` when unset. Never
            reuse a nonce under the same key.
    """
    _check_key(key)
    if not plaintext:
        raise EmptyInputError("`plaintext` must not be empty.")
    if nonce is None:
        nonce = os.urandom(NONCE_SIZE)
    if len(nonce) != NONCE_SIZE:
        raise ParameterError(
            f"`nonce` must be {NONCE_SIZE} bytes. Received: length {len(nonce)}"
        )
    header = EncryptedBatch(
        batch_id=batch_id,
        nonce=bytes(nonce),
        ciphertext=b"",
        plaintext_digest=sha256(bytes(plaintext)),
        data_type=data_type,
    )
    ciphertext = ChaCha20Poly1305(bytes(key)).encrypt(
        header.nonce, bytes(plaintext), header.associated_data()
    )
    return dataclasses.replace(header, ciphertext=ciphertext)


def decrypt_batch(key, batch):
    """Decrypt and authenticate `batch`.

    Raises:
        AuthenticationError: wrong key or any tampered field.
    """
    _check_key(key)
    if len(batch.plaintext_digest) != DIGEST_SIZE:
        raise AuthenticationError("Batch digest has the wrong size.")
    try:
        plaintext = ChaCha20Poly1305(bytes(key)).decrypt(
            batch.nonce, batch.ciphertext, batch.associated_data()
        )
    except (InvalidTag, ValueError):
        raise AuthenticationError(
            f"Batch {batch.batch_id!r} failed authentication."
        )
    if sha256(plaintext) != batch.plaintext_digest:
        raise AuthenticationError(
            f"Batch {batch.batch_id!r} does not match its digest."
        )
    return plaintext
