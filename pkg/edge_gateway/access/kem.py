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
"""Key encapsulation mechanisms.

Two instantiations share the `KEM` interface: `X25519Kem`, an
elliptic-curve Diffie-Hellman KEM built on `cryptography`, and `OQSKEM`,
the post-quantum Kyber512 / ML-KEM-512 KEM from liboqs.
"""

import dataclasses

from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric import x25519
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from edge_gateway.utils.errors import DecapsulationError
from edge_gateway.utils.errors import ParameterError

try:
    import oqs
except ImportError:
    oqs = None

SHARED_SECRET_SIZE = 32


@dataclasses.dataclass(frozen=True)
class KemKeyPair:
    algorithm_id: str
    public_key: bytes
    secret_key: bytes = dataclasses.field(repr=False)


class KEM:
    """Interface of a key encapsulation mechanism.

    `decapsulate(secret_key, ciphertext)` returns the shared secret that
    `encapsulate(public_key)` produced along with `ciphertext`.
    """

    algorithm_id = None

    def generate_keypair(self, seed=None):
        raise NotImplementedError

    def encapsulate(self, public_key, entropy=None):
        """Return `(ciphertext, shared_secret)`."""
        raise NotImplementedError

    def decapsulate(self, secret_key, ciphertext):
        raise NotImplementedError


def _raw_public(key):
    return key.public_key().public_bytes(
        serialization.Encoding.Raw, serialization.PublicFormat.Raw
    )


class X25519Kem(KEM):
    """Diffie-Hellman KEM over X25519 with an HKDF-SHA256 combiner.

    The ciphertext is the encapsulator's ephemeral public key. The shared
    secret is HKDF of the X25519 output, bound to both public keys.

    `seed` and `entropy` make key generation and encapsulation
    deterministic; leave them unset outside reproducible simulations.
    """

    algorithm_id = "X25519-HKDF-SHA256"
    key_size = 32

    def _combine(self, shared, ciphertext, public_key):
        return HKDF(
            algorithm=hashes.SHA256(),
            length=SHARED_SECRET_SIZE,
            salt=None,
            info=b"edge-gateway/kem/v1" + ciphertext + public_key,
        ).derive(shared)

    def _private_key(self, material, name):
        if material is None:
            return x25519.X25519PrivateKey.generate()
        if len(material) != self.key_size:
            raise ParameterError(
                f"`{name}` must be {self.key_size} bytes. "
                f"Received: length {len(material)}"
            )
        return x25519.X25519PrivateKey.from_private_bytes(bytes(material))

    def generate_keypair(self, seed=None):
        private = self._private_key(seed, "seed")
        secret = private.private_bytes(
            serialization.Encoding.Raw,
            serialization.PrivateFormat.Raw,
            serialization.NoEncryption(),
        )
        return KemKeyPair(self.algorithm_id, _raw_public(private), secret)

    def encapsulate(self, public_key, entropy=None):
        try:
            peer = x25519.X25519PublicKey.from_public_bytes(bytes(public_key))
        except ValueError as e:
            raise ParameterError(f"Malformed X25519 public key: {e}")
        ephemeral = self._private_key(entropy, "entropy")
        ciphertext = _raw_public(ephemeral)
        try:
            shared = ephemeral.exchange(peer)
        except ValueError as e:
            raise ParameterError(f"Degenerate X25519 public key: {e}")
        return ciphertext, self._combine(shared, ciphertext, bytes(public_key))

    def decapsulate(self, secret_key, ciphertext):
        private = self._private_key(secret_key, "secret_key")
        try:
            peer = x25519.X25519PublicKey.from_public_bytes(bytes(ciphertext))
            shared = private.exchange(peer)
        except ValueError as e:
            raise DecapsulationError(f"Invalid KEM ciphertext: {e}")
        return self._combine(shared, bytes(ciphertext), _raw_public(private))


def find_oqs_mechanism(names, enabled):
    """The first of `names` that liboqs has enabled."""
    for name in names:
        if name in enabled:
            return name
    raise ParameterError(
        f"liboqs supports none of {names}. Enabled mechanisms: {enabled}"
    )


class OQSKEM(KEM):
    """A post-quantum KEM from liboqs, Kyber512 by default.

    Kyber512 and its standardized successor ML-KEM-512 are accepted as
    aliases of each other. liboqs draws its own randomness, so `seed` and
    `entropy` are ignored.
    """

    ALIASES = {
        "Kyber512": ("Kyber512", "ML-KEM-512"),
        "ML-KEM-512": ("ML-KEM-512", "Kyber512"),
    }

    def __init__(self, algorithm="Kyber512"):
        if oqs is None:
            raise ImportError(
                f"{self.__class__.__name__} requires the `oqs` package. "
                "Please install it with `pip install liboqs-python`."
            )
        names = self.ALIASES.get(algorithm, (algorithm,))
        self.mechanism = find_oqs_mechanism(
            names, oqs.get_enabled_kem_mechanisms()
        )
        self.algorithm_id = algorithm

    def generate_keypair(self, seed=None):
        with oqs.KeyEncapsulation(self.mechanism) as kem:
            public_key = kem.generate_keypair()
            secret_key = kem.export_secret_key()
        return KemKeyPair(self.algorithm_id, bytes(public_key), secret_key)

    def encapsulate(self, public_key, entropy=None):
        with oqs.KeyEncapsulation(self.mechanism) as kem:
            ciphertext, shared = kem.encap_secret(bytes(public_key))
        return bytes(ciphertext), bytes(shared)

    def decapsulate(self, secret_key, ciphertext):
        try:
            with oqs.KeyEncapsulation(self.mechanism, secret_key) as kem:
                return bytes(kem.decap_secret(bytes(ciphertext)))
        except (RuntimeError, ValueError) as e:
            raise DecapsulationError(f"Invalid KEM ciphertext: {e}")


KEMS = {
    X25519Kem.algorithm_id: X25519Kem,
    "Kyber512": OQSKEM,
    "ML-KEM-512": OQSKEM,
}


def get_kem(algorithm_id=X25519Kem.algorithm_id):
    """Instantiate the KEM registered as `algorithm_id`."""
    if algorithm_id not in KEMS:
        raise ParameterError(
            f"`algorithm_id` must be one of {sorted(KEMS)}. "
            f"Received: algorithm_id={algorithm_id}"
        )
    if KEMS[algorithm_id] is OQSKEM:
        return OQSKEM(algorithm_id)
    return KEMS[algorithm_id]()
