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
"""Blocks of the hash-chained ledger."""

import dataclasses

from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import OrderingError
from edge_gateway.utils.serialization import ZERO_DIGEST
from edge_gateway.utils.serialization import digest_of
from edge_gateway.utils.serialization import sha256
from edge_gateway.utils.serialization import to_canonical

GENESIS_DATA_TYPE = "genesis"


@dataclasses.dataclass(frozen=True)
class BlockHeader:
    height: int
    prev_hash: bytes
    timestamp: int
    data_type: str
    payload_digest: bytes

    def hash(self):
        """SHA-256 of the canonical JSON of this header."""
        return digest_of(self)


@dataclasses.dataclass(frozen=True)
class Block:
    """A header, its opaque body and the header hash stored at creation.

    Build blocks with `make_block` so `block_hash` and
    `header.payload_digest` are consistent.
    """

    header: BlockHeader
    body: bytes
    block_hash: bytes

    @property
    def height(self):
        return self.header.height

    @property
    def timestamp(self):
        return self.header.timestamp

    def to_dict(self):
        return to_canonical(self)

    @classmethod
    def from_dict(cls, config):
        try:
            header = config["header"]
            return cls(
                header=BlockHeader(
                    height=int(header["height"]),
                    prev_hash=bytes.fromhex(header["prev_hash"]),
                    timestamp=int(header["timestamp"]),
                    data_type=str(header["data_type"]),
                    payload_digest=bytes.fromhex(header["payload_digest"]),
                ),
                body=bytes.fromhex(config["body"]),
                block_hash=bytes.fromhex(config["block_hash"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f"Malformed block: {e}")


def make_block(prev, body, data_type, timestamp):
    """Build the block following `prev`.

    Args:
        prev: the parent `BlockHeader` or `Block`, or None for genesis.
        body: bytes. The block body, normally an encrypted payload.
        data_type: string. Tag describing the body.
        timestamp: int. Creation time in ms, not before the parent's.

    Raises:
        OrderingError: `timestamp` is older than the parent's.
    """
    if isinstance(prev, Block):
        prev = prev.header
    if prev is None:
        height, prev_hash = 0, ZERO_DIGEST
    else:
        if timestamp < prev.timestamp:
            raise OrderingError(
                f"Block timestamp {timestamp} precedes its parent's "
                f"{prev.timestamp}."
            )
        height, prev_hash = prev.height + 1, prev.hash()
    header = BlockHeader(
        height=height,
        prev_hash=prev_hash,
        timestamp=int(timestamp),
        data_type=data_type,
        payload_digest=sha256(bytes(body)),
    )
    return Block(header=header, body=bytes(body), block_hash=header.hash())


def make_genesis(timestamp=0, body=b""):
    return make_block(None, body, GENESIS_DATA_TYPE, timestamp)
