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
"""Tests for the simulated network and the replicated ledger."""

import json
import os

import tensorflow as tf

from edge_gateway.ledger.simnet import ReplicatedLedger
from edge_gateway.ledger.simnet import SimNet
from edge_gateway.ledger.simnet import SimNetConfig
from edge_gateway.ledger.simnet import gossip_broadcast
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import ParameterError


def full_network(num_nodes, seed=0, fanout=3):
    return SimNet(
        SimNetConfig.from_config(
            {"num_nodes": num_nodes, "seed": seed, "fanout": fanout}
        )
    )


class SimNetConfigTest(tf.test.TestCase):
    def test_num_nodes(self):
        config = SimNetConfig.from_config({"num_nodes": 3})
        self.assertEqual(config.nodes, ("node-0", "node-1", "node-2"))

    def test_from_file(self):
        path = os.path.join(self.get_temp_dir(), "net.json")
        with open(path, "w") as f:
            json.dump({"nodes": ["a", "b"], "stakes": {"a": 3}}, f)
        config = SimNetConfig.from_file(path)
        self.assertEqual(config.stakes, {"a": 3})
        self.assertEqual(
            SimNetConfig.from_config(config.get_config()), config
        )

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=())
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=("a", "a"))
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=("a",), topology="star")
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=("a",), fanout=0)
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=("a",), latency_ms=(10.0, 5.0))
        with self.assertRaises(ConfigError):
            SimNetConfig(nodes=("a",), topology="custom", edges=(("a", "z"),))
        with self.assertRaises(ConfigError):
            SimNetConfig.from_config({"fanout": 2})
        path = os.path.join(self.get_temp_dir(), "broken.json")
        with open(path, "w") as f:
            f.write("{nodes")
        with self.assertRaises(ConfigError):
            SimNetConfig.from_file(path)


class GossipBroadcastTest(tf.test.TestCase):
    def test_full_network_convergence(self):
        rounds = []
        for seed in range(100):
            net = full_network(27, seed=seed)
            report = gossip_broadcast(net, "node-0", b"block hash")
            self.assertEqual(report.reached, set(net.nodes))
            rounds.append(report.rounds)
        self.assertLessEqual(max(rounds), 5)

    def test_pushes_prefer_uninformed_peers(self):
        # Four informed nodes cover the three uninformed ones in round 2.
        for seed in range(20):
            net = full_network(7, seed=seed)
            report = gossip_broadcast(net, "node-0", b"message")
            self.assertEqual(report.rounds, 2)
            self.assertEqual(report.reached, set(net.nodes))

    def test_single_node(self):
        net = SimNet(SimNetConfig(nodes=("solo",)))
        report = gossip_broadcast(net, "solo", b"message")
        self.assertEqual(report.reached, {"solo"})
        self.assertEqual(report.rounds, 0)

    def test_disconnected_node(self):
        config = SimNetConfig(
            nodes=("a", "b", "c", "d"),
            topology="custom",
            edges=(("a", "b"), ("b", "c")),
        )
        report = gossip_broadcast(SimNet(config), "a", b"message")
        self.assertEqual(report.reached, {"a", "b", "c"})

    def test_ring_floods_hop_by_hop(self):
        config = SimNetConfig.from_config(
            {"num_nodes": 10, "topology": "ring"}
        )
        report = gossip_broadcast(SimNet(config), "node-0", b"message")
        self.assertEqual(report.rounds, 5)
        self.assertEqual(report.receipts["node-5"].round, 5)
        self.assertEqual(report.receipts["node-1"].round, 1)
        self.assertEqual(report.receipts["node-9"].round, 1)

    def test_latency(self):
        net = full_network(10)
        report = gossip_broadcast(net, "node-3", b"message")
        self.assertEqual(report.receipts["node-3"].time_ms, 0.0)
        for node, receipt in report.receipts.items():
            if node != "node-3":
                self.assertGreaterEqual(receipt.time_ms, 5.0)
                self.assertLessEqual(receipt.time_ms, 50.0 * receipt.round)

    def test_deterministic(self):
        net = full_network(15, seed=4)
        first = gossip_broadcast(net, "node-0", b"message")
        second = gossip_broadcast(net, "node-0", b"message")
        self.assertEqual(first, second)

    def test_unknown_origin(self):
        with self.assertRaises(ParameterError):
            gossip_broadcast(full_network(3), "nobody", b"message")


class ReplicatedLedgerTest(tf.test.TestCase):
    def test_nodes_agree(self):
        config = SimNetConfig.from_config(
            {"num_nodes": 7, "stakes": {"node-0": 5, "node-1": 2}}
        )
        ledger = ReplicatedLedger(SimNet(config))
        proposers = set()
        for i in range(20):
            proposer, report = ledger.propose(
                f"batch {i}".encode(), "ecg", 1000 * i
            )
            proposers.add(proposer)
            self.assertEqual(report.origin, proposer)
            self.assertTrue(ledger.in_agreement())
        self.assertGreater(len(proposers), 1)
        for chain in ledger.chains.values():
            self.assertEqual(chain.height, 20)
            self.assertTrue(chain.verify())

    def test_isolated_node_falls_behind(self):
        config = SimNetConfig(
            nodes=("a", "b", "c"), topology="custom", edges=(("a", "b"),)
        )
        ledger = ReplicatedLedger(SimNet(config))
        ledger.propose(b"batch", "ecg", 1000)
        self.assertFalse(ledger.in_agreement())
