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
"""Deterministic simulated network with push gossip and PoS replication."""

import dataclasses
import json
from typing import Dict

import numpy as np
from absl import logging

from edge_gateway.ledger.chain import Chain
from edge_gateway.ledger.consensus import Validator
from edge_gateway.ledger.consensus import select_proposer
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import ForkError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.serialization import sha256

TOPOLOGIES = ("full", "ring", "custom")


@dataclasses.dataclass(frozen=True)
class SimNetConfig:
    """Nodes, stakes and gossip parameters of a simulated network.

    Args:
        nodes: tuple of node ids.
        stakes: dict of node id to integer stake. Missing nodes stake 1.
        topology: `"full"`, `"ring"` or `"custom"`.
        edges: tuple of `(a, b)` pairs, used by the custom topology.
        fanout: int. Neighbors each informed node pushes to per round.
        latency_ms: pair of floats. Bounds of the uniform per-hop latency.
        seed: int. Seed of every random draw.
    """

    nodes: tuple
    stakes: dict = dataclasses.field(default_factory=dict)
    topology: str = "full"
    edges: tuple = ()
    fanout: int = 3
    latency_ms: tuple = (5.0, 50.0)
    seed: int = 0

    def __post_init__(self):
        if not self.nodes:
            raise ConfigError("A network needs at least one node.")
        if len(set(self.nodes)) != len(self.nodes):
            raise ConfigError(f"Duplicate node ids in {self.nodes}.")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(
                f"`topology` must be one of {TOPOLOGIES}. "
                f"Received: topology={self.topology}"
            )
        if self.fanout < 1:
            raise ConfigError(
                f"`fanout` must be >= 1. Received: fanout={self.fanout}"
            )
        low, high = self.latency_ms
        if not 0 <= low <= high:
            raise ConfigError(
                "`latency_ms` must satisfy 0 <= low <= high. "
                f"Received: latency_ms={self.latency_ms}"
            )
        unknown = {n for edge in self.edges for n in edge} - set(self.nodes)
        if unknown:
            raise ConfigError(f"Edges name unknown nodes {sorted(unknown)}.")

    def get_config(self):
        return {
            "nodes": list(self.nodes),
            "stakes": dict(self.stakes),
            "topology": self.topology,
            "edges": [list(edge) for edge in self.edges],
            "fanout": self.fanout,
            "latency_ms": list(self.latency_ms),
            "seed": self.seed,
        }

    @classmethod
    def from_config(cls, config):
        config = dict(config)
        if "num_nodes" in config:
            count = config.pop("num_nodes")
            config.setdefault("nodes", [f"node-{i}" for i in range(count)])
        try:
            config["nodes"] = tuple(config["nodes"])
            config["edges"] = tuple(
                tuple(edge) for edge in config.get("edges", ())
            )
            config["latency_ms"] = tuple(config.get("latency_ms", (5.0, 50.0)))
            return cls(**config)
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Invalid network config: {e}")

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as f:
            try:
                config = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path} is not valid JSON: {e}")
        return cls.from_config(config)


@dataclasses.dataclass(frozen=True)
class Receipt:
    round: int
    time_ms: float


@dataclasses.dataclass(frozen=True)
class DeliveryReport:
    origin: str
    receipts: Dict[str, Receipt]

    @property
    def reached(self):
        return set(self.receipts)

    @property
    def rounds(self):
        return max(receipt.round for receipt in self.receipts.values())


class SimNet:
    """Adjacency and validators built from a `SimNetConfig`."""

    def __init__(self, config):
        self.config = config
        self.nodes = tuple(config.nodes)
        neighbors = {node: set() for node in self.nodes}
        if config.topology == "full":
            for node in self.nodes:
                neighbors[node] = set(self.nodes) - {node}
        elif config.topology == "ring" and len(self.nodes) > 1:
            for i, node in enumerate(self.nodes):
                nxt = self.nodes[(i + 1) % len(self.nodes)]
                neighbors[node].add(nxt)
                neighbors[nxt].add(node)
        for a, b in config.edges:
            if a != b:
                neighbors[a].add(b)
                neighbors[b].add(a)
        order = {node: i for i, node in enumerate(self.nodes)}
        self.neighbors = {
            node: tuple(sorted(peers, key=order.get))
            for node, peers in neighbors.items()
        }
        self.validators = tuple(
            Validator(node, int(config.stakes.get(node, 1)))
            for node in self.nodes
        )


def _message_rng(seed, message):
    tag = int.from_bytes(sha256(bytes(message))[:8], "big")
    return np.random.default_rng([seed, tag])


def gossip_broadcast(net, origin, message):
    """Spread `message` from `origin` by synchronous push gossip.

    In every round each informed node pushes to `fanout` distinct random
    neighbors, drawn from the ones still uninformed at the start of the
    round before any informed ones. Rounds continue until no informed node
    has an uninformed neighbor. Each first receipt is stamped with its
    round and with the sender's receipt time plus a uniform per-hop
    latency. Draws are seeded by the network seed and the message hash.

    Returns:
        A `DeliveryReport`. Nodes not connected to `origin` are absent.
    """
    if origin not in net.neighbors:
        raise ParameterError(f"Unknown origin node {origin!r}.")
    rng = _message_rng(net.config.seed, message)
    low, high = net.config.latency_ms
    receipts = {origin: Receipt(0, 0.0)}
    round_number = 0
    while any(
        peer not in receipts
        for node in receipts
        for peer in net.neighbors[node]
    ):
        round_number += 1
        arrivals = {}
        for node in [n for n in net.nodes if n in receipts]:
            peers = net.neighbors[node]
            if not peers:
                continue
            count = min(net.config.fanout, len(peers))
            fresh = [p for p in peers if p not in receipts]
            stale = [p for p in peers if p in receipts]
            order = [fresh[i] for i in rng.permutation(len(fresh))]
            order += [stale[i] for i in rng.permutation(len(stale))]
            for peer in order[:count]:
                arrival = receipts[node].time_ms + rng.uniform(low, high)
                if peer not in receipts:
                    arrivals[peer] = min(arrival, arrivals.get(peer, np.inf))
        for peer in [n for n in net.nodes if n in arrivals]:
            receipts[peer] = Receipt(round_number, float(arrivals[peer]))
    logging.vlog(1, "Gossip from %s reached %d nodes.", origin, len(receipts))
    return DeliveryReport(origin=origin, receipts=receipts)


class ReplicatedLedger:
    """Per-node chains kept in step by one stake-weighted proposer a round.

    Each round the proposer extends its own tip and gossips the block;
    every node it reaches appends the block before the next round starts.
    """

    def __init__(self, net, genesis=None):
        self.net = net
        self.chains = {node: Chain(genesis) for node in net.nodes}
        self.round = 0

    def propose(self, body, data_type, timestamp):
        """Run one round. Returns the proposer id and the delivery report."""
        proposer = select_proposer(
            self.net.validators, self.round, self.net.config.seed
        )
        block = self.chains[proposer].add(body, data_type, timestamp)
        report = gossip_broadcast(self.net, proposer, block.block_hash)
        for node in report.reached - {proposer}:
            try:
                self.chains[node].append(block)
            except ForkError:
                logging.warning(
                    "Node %s is behind and cannot append block %d.",
                    node,
                    block.height,
                )
        self.round += 1
        return proposer, report

    def tips(self):
        return {
            node: chain.tip.block_hash for node, chain in self.chains.items()
        }

    def in_agreement(self):
        return len(set(self.tips().values())) == 1
