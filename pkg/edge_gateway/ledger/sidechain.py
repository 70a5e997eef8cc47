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
"""Local sidechain of block hashes and batch metadata."""

import dataclasses
import threading

from edge_gateway.utils.errors import IdempotencyError
from edge_gateway.utils.errors import NotFoundError
from edge_gateway.utils.serialization import to_canonical


@dataclasses.dataclass(frozen=True)
class SideChainEntry:
    """Metadata of one stored block. Never carries payload bytes."""

    block_hash: bytes
    batch_id: str
    data_type: str
    size: int
    owner_id: str
    timestamp: int

    def to_dict(self):
        return to_canonical(self)


class SideChainStore:
    """Entries keyed by block hash, with a batch id index."""

    def __init__(self):
        self._entries = {}
        self._by_batch = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, block_hash):
        return block_hash in self._entries

    def record(self, entry):
        """Store `entry`. Raises `IdempotencyError` for a known hash."""
        with self._lock:
            if entry.block_hash in self._entries:
                raise IdempotencyError(
                    f"Block {entry.block_hash.hex()} is already recorded."
                )
            self._entries[entry.block_hash] = entry
            self._by_batch.setdefault(entry.batch_id, []).append(entry)
        return entry

    def get(self, block_hash):
        try:
            return self._entries[block_hash]
        except KeyError:
            raise NotFoundError(f"No entry for block {block_hash.hex()}.")

    def find_batch(self, batch_id):
        """All entries of `batch_id`, oldest first."""
        return list(self._by_batch.get(batch_id, ()))

    def entries(self):
        return list(self._entries.values())


def record_sidechain(entry, store):
    return store.record(entry)
