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
"""Batch key hierarchy derived from one master secret."""

import dataclasses
import os

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from edge_gateway.utils.errors import ParameterError

KEY_SIZE = 32
CHILD_KEY_LABEL = b"edge-gateway/child-key/v1"
DERIVED_PRIVATE_LABEL = b"edge-gateway/derived-private/v1"


def _hkdf(secret, info):
    return HKDF(
        algorithm=hashes.SHA256(), length=KEY_SIZE, salt=None, info=info
    ).derive(secret)


def _check_secret(secret, name):
    if not isinstance(secret, (bytes, bytearray)):
        raise ParameterError(
            f"`{name}` must be a byte string. "
            f"Received: type={type(secret).__name__}"
        )
    if len(secret) != KEY_SIZE:
        raise ParameterError(
            f"`{name}` must be {KEY_SIZE} bytes. Received: length {len(secret)}"
        )


def derive_child_key(master_secret, batch_index):
    """The key encrypting batch number `batch_index`.

    HKDF-SHA256 over the master secret, with the child-key label and the
    big-endian index as the context.
    """
    _check_secret(master_secret, "master_secret")
    if int(batch_index) != batch_index or batch_index < 0:
        raise ParameterError(
            "`batch_index` must be an integer >= 0. "
            f"Received: batch_index={batch_index}"
        )
    info = CHILD_KEY_LABEL + int(batch_index).to_bytes(8, "big")
    return _hkdf(bytes(master_secret), info)


def derive_private_key(master_secret):
    """The gateway's derived private key, used only to seed its signer."""
    _check_secret(master_secret, "master_secret")
    return _hkdf(bytes(master_secret), DERIVED_PRIVATE_LABEL)


@dataclasses.dataclass(frozen=True)
class KeyRing:
    """Immutable master secret and the keys derived from it.

    Use `KeyRing.create()` rather than the constructor.
    """

    master_secret: bytes = dataclasses.field(repr=False)
    derived_private: bytes = dataclasses.field(repr=False)

    @classmethod
    def create(cls, master_secret=None):
        """Build a key ring, drawing a random master secret if none given."""
        if master_secret is None:
            master_secret = os.urandom(KEY_SIZE)
        _check_secret(master_secret, "master_secret")
        master_secret = bytes(master_secret)
        return cls(
            master_secret=master_secret,
            derived_private=derive_private_key(master_secret),
        )

    def child_key(self, batch_index):
        return derive_child_key(self.master_secret, batch_index)

    def signing_key_pair(self, scheme):
        """The signing key pair of scheme `scheme` seeded from this ring."""
        return scheme.generate_keypair(seed=self.derived_private)
