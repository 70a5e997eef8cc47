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
"""Append-only chain of blocks with tamper detection."""

import json
import threading

from absl import logging

from edge_gateway.ledger.blocks import Block
from edge_gateway.ledger.blocks import make_block
from edge_gateway.ledger.blocks import make_genesis
from edge_gateway.utils.errors import EmptyInputError
from edge_gateway.utils.errors import ForkError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.errors import OrderingError
from edge_gateway.utils.errors import TamperError
from edge_gateway.utils.serialization import ZERO_DIGEST
from edge_gateway.utils.serialization import canonical_json
from edge_gateway.utils.serialization import sha256


def block_problem(block, height, parent):
    """Why `block` is not a valid block at `height` after `parent`.

    Returns None for a valid block.
    """
    header = block.header
    if header.height != height:
        return f"height field is {header.height}"
    if header.hash() != block.block_hash:
        return "header does not match its stored hash"
    if sha256(block.body) != header.payload_digest:
        return "body does not match its payload digest"
    expected_prev = ZERO_DIGEST if parent is None else parent.block_hash
    if header.prev_hash != expected_prev:
        return "previous hash does not link to the parent"
    if parent is not None and header.timestamp < parent.timestamp:
        return "timestamp precedes the parent's"
    return None


def check_block(block, height, parent):
    """Raise if `block` is not a valid block at `height` after `parent`.

    Raises:
        ForkError: the block does not link to `parent` at `height`.
        OrderingError: the block is older than `parent`.
        TamperError: the block's hash or payload digest is wrong.
    """
    header = block.header
    expected_prev = ZERO_DIGEST if parent is None else parent.block_hash
    if header.height != height or header.prev_hash != expected_prev:
        raise ForkError(
            f"Block at height {height} does not link to its parent. "
            f"It claims height {header.height}."
        )
    if parent is not None and header.timestamp < parent.timestamp:
        raise OrderingError(
            f"Block timestamp {header.timestamp} precedes the parent's "
            f"{parent.timestamp}."
        )
    problem = block_problem(block, height, parent)
    if problem:
        raise TamperError(f"Block at height {height}: {problem}.")


class Chain:
    """A linear chain rooted at a genesis block.

    Appends are serialized by a lock; reads need no locking.

    Args:
        genesis: `Block`. Defaults to an empty genesis block at time 0.
    """

    def __init__(self, genesis=None):
        genesis = genesis or make_genesis()
        problem = block_problem(genesis, 0, None)
        if problem:
            raise TamperError(f"Invalid genesis block: {problem}.")
        self._blocks = [genesis]
        self._lock = threading.RLock()

    @classmethod
    def from_blocks(cls, blocks):
        """Wrap `blocks` as a chain without validating them."""
        blocks = list(blocks)
        if not blocks:
            raise EmptyInputError("A chain needs at least a genesis block.")
        chain = cls.__new__(cls)
        chain._blocks = blocks
        chain._lock = threading.RLock()
        return chain

    def __len__(self):
        return len(self._blocks)

    def __getitem__(self, height):
        return self._blocks[height]

    def __iter__(self):
        return iter(list(self._blocks))

    @property
    def tip(self):
        return self._blocks[-1]

    @property
    def height(self):
        return self.tip.height

    def append(self, block):
        """Append `block` to the tip.

        Raises:
            ForkError: `block` does not extend the current tip.
            TamperError: the block's hash or payload digest is wrong.
            OrderingError: the block is older than the tip.
        """
        with self._lock:
            check_block(block, self._blocks[-1].height + 1, self._blocks[-1])
            self._blocks.append(block)
        logging.vlog(1, "Appended block %d.", block.header.height)
        return block

    def add(self, body, data_type, timestamp):
        """Build a block on the tip and append it."""
        with self._lock:
            block = make_block(self._blocks[-1], body, data_type, timestamp)
            return self.append(block)

    def first_invalid_height(self):
        """Height of the first invalid block, None if the chain verifies."""
        parent = None
        for height, block in enumerate(self._blocks):
            if block_problem(block, height, parent):
                return height
            parent = block
        return None

    def verify(self):
        """Walk the chain from genesis and raise on the first bad block.

        Raises:
            ForkError: a block does not link to its parent.
            OrderingError: a block is older than its parent.
            TamperError: a block's hash or payload digest is wrong.

        Each error names the height of the first bad block, and `append`
        raises the same error for the same block.
        """
        parent = None
        for height, block in enumerate(self._blocks):
            check_block(block, height, parent)
            parent = block
        return True

    def dump(self, path):
        """Write the chain as newline-delimited canonical JSON."""
        with open(path, "w", encoding="utf-8") as f:
            for block in self._blocks:
                f.write(canonical_json(block.to_dict()) + "\n")

    @classmethod
    def restore(cls, path):
        """Read a chain written by `dump` and verify it."""
        blocks = []
        with open(path, "r", encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    blocks.append(Block.from_dict(json.loads(line)))
                except json.JSONDecodeError as e:
                    raise FormatError(f"Line {line_number} of {path}: {e}")
        chain = cls.from_blocks(blocks)
        chain.verify()
        return chain
