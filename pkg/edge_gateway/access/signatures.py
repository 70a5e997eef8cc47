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
"""Digital signature schemes: Ed25519 and liboqs Dilithium2 / ML-DSA-44."""

import dataclasses

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric import ed25519

from edge_gateway.access.kem import find_oqs_mechanism
from edge_gateway.utils.errors import ParameterError

try:
    import oqs
except ImportError:
    oqs = None


@dataclasses.dataclass(frozen=True)
class SigningKeyPair:
    algorithm_id: str
    public_key: bytes
    secret_key: bytes = dataclasses.field(repr=False)

    def sign(self, message):
        return get_signature_scheme(self.algorithm_id).sign(
            self.secret_key, message
        )


class SignatureScheme:
    """Interface of a signature scheme.

    `verify` returns a bool and never raises on a bad signature.
    """

    algorithm_id = None

    def generate_keypair(self, seed=None):
        raise NotImplementedError

    def sign(self, secret_key, message):
        raise NotImplementedError

    def verify(self, public_key, message, signature):
        raise NotImplementedError


class Ed25519Signature(SignatureScheme):
    """Ed25519 signatures. A 32-byte `seed` fixes the key pair."""

    algorithm_id = "Ed25519"

    def generate_keypair(self, seed=None):
        if seed is None:
            private = ed25519.Ed25519PrivateKey.generate()
        else:
            private = ed25519.Ed25519PrivateKey.from_private_bytes(bytes(seed))
        return SigningKeyPair(
            self.algorithm_id,
            private.public_key().public_bytes(
                serialization.Encoding.Raw, serialization.PublicFormat.Raw
            ),
            private.private_bytes(
                serialization.Encoding.Raw,
                serialization.PrivateFormat.Raw,
                serialization.NoEncryption(),
            ),
        )

    def sign(self, secret_key, message):
        private = ed25519.Ed25519PrivateKey.from_private_bytes(secret_key)
        return private.sign(bytes(message))

    def verify(self, public_key, message, signature):
        try:
            key = ed25519.Ed25519PublicKey.from_public_bytes(bytes(public_key))
            key.verify(bytes(signature), bytes(message))
        except (InvalidSignature, ValueError):
            return False
        return True


class OQSSignature(SignatureScheme):
    """A post-quantum signature scheme from liboqs, Dilithium2 by default.

    Dilithium2 and ML-DSA-44 are accepted as aliases of each other. `seed`
    is ignored.
    """

    ALIASES = {
        "Dilithium2": ("Dilithium2", "ML-DSA-44"),
        "ML-DSA-44": ("ML-DSA-44", "Dilithium2"),
    }

    def __init__(self, algorithm="Dilithium2"):
        if oqs is None:
            raise ImportError(
                f"{self.__class__.__name__} requires the `oqs` package. "
                "Please install it with `pip install liboqs-python`."
            )
        names = self.ALIASES.get(algorithm, (algorithm,))
        self.mechanism = find_oqs_mechanism(
            names, oqs.get_enabled_sig_mechanisms()
        )
        self.algorithm_id = algorithm

    def generate_keypair(self, seed=None):
        with oqs.Signature(self.mechanism) as signer:
            public_key = signer.generate_keypair()
            secret_key = signer.export_secret_key()
        return SigningKeyPair(self.algorithm_id, bytes(public_key), secret_key)

    def sign(self, secret_key, message):
        with oqs.Signature(self.mechanism, secret_key) as signer:
            return bytes(signer.sign(bytes(message)))

    def verify(self, public_key, message, signature):
        try:
            with oqs.Signature(self.mechanism) as verifier:
                return bool(
                    verifier.verify(
                        bytes(message), bytes(signature), bytes(public_key)
                    )
                )
        except (RuntimeError, ValueError):
            return False


SIGNATURE_SCHEMES = {
    Ed25519Signature.algorithm_id: Ed25519Signature,
    "Dilithium2": OQSSignature,
    "ML-DSA-44": OQSSignature,
}


def get_signature_scheme(algorithm_id=Ed25519Signature.algorithm_id):
    """Instantiate the signature scheme registered as `algorithm_id`."""
    if algorithm_id not in SIGNATURE_SCHEMES:
        raise ParameterError(
            f"`algorithm_id` must be one of {sorted(SIGNATURE_SCHEMES)}. "
            f"Received: algorithm_id={algorithm_id}"
        )
    if SIGNATURE_SCHEMES[algorithm_id] is OQSSignature:
        return OQSSignature(algorithm_id)
    return SIGNATURE_SCHEMES[algorithm_id]()
