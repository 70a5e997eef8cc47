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
"""In-process storage provider for encrypted batches."""

import threading

from edge_gateway.utils.errors import IntegrityError
from edge_gateway.utils.errors import StorageError
from edge_gateway.utils.serialization import sha256


class StorageProvider:
    """Payload bytes keyed by their SHA-256 digest.

    `get` returns the stored bytes as they are; callers compare them
    against the digest they expect. `overwrite` and `drop` simulate a
    corrupted or unreachable provider.
    """

    def __init__(self):
        self._blobs = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._blobs)

    def __contains__(self, digest):
        return digest in self._blobs

    def put(self, payload, digest=None):
        """Store `payload` and return its digest.

        Raises:
            IntegrityError: `digest` is given and is not the payload's.
        """
        payload = bytes(payload)
        actual = sha256(payload)
        if digest is not None and bytes(digest) != actual:
            raise IntegrityError(
                f"Payload hashes to {actual.hex()}, expected "
                f"{bytes(digest).hex()}."
            )
        with self._lock:
            self._blobs[actual] = payload
        return actual

    def get(self, digest):
        try:
            return self._blobs[digest]
        except KeyError:
            raise StorageError(f"Payload {digest.hex()} is not available.")

    def overwrite(self, digest, payload):
        with self._lock:
            self._blobs[digest] = bytes(payload)

    def drop(self, digest):
        with self._lock:
            self._blobs.pop(digest, None)
