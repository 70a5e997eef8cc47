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
"""Tests for scenario runs, including random-trace fuzzing."""

import json
import os

import pytest
import tensorflow as tf

from edge_gateway.market.data_market import DataMarket
from edge_gateway.market.records import CONFIRMED
from edge_gateway.market.records import TERMINAL_STATES
from edge_gateway.market.records import TRANSITIONS
from edge_gateway.market.scenario import Scenario
from edge_gateway.market.scenario import ScenarioRunner
from edge_gateway.market.scenario import run_scenario
from edge_gateway.utils.errors import ConfigError


def request(deposit):
    return {
        "op": "request_deal",
        "buyer": "hospital",
        "batch_id": "b0",
        "deposit": deposit,
    }


SCRIPTED = {
    "participants": {"hospital": 50, "gateway": 0},
    "batches": [{"batch_id": "b0", "owner": "gateway", "min_deposit": 10}],
    "operations": [
        request(10),
        {"op": "settle"},
        {"op": "deliver_deal_key", "deal_id": "deal-000000"},
        {"op": "finalize", "deal_id": "deal-000000"},
        request(60),
    ],
}


def check_random_trace(test, seed, num_operations=30):
    """Run a random trace and assert the market invariants."""
    runner = ScenarioRunner(
        Scenario.random(seed, num_operations=num_operations)
    )
    runner.setup()
    market = runner.market
    total = market.escrow.total()

    def check_step(operation):
        before = {d.deal_id: d.state for d in market.deals.values()}
        height = market.chain.height
        event = runner.run_operation(operation)
        for deal in market.deals.values():
            old = before.get(deal.deal_id)
            if old is not None and old != deal.state:
                test.assertIn(deal.state, TRANSITIONS[old])
        if not event["accepted"]:
            test.assertEqual(market.chain.height, height)
        test.assertEqual(market.escrow.total(), total)

    for _ in range(num_operations):
        check_step(runner.random_operation())
    runner.quiesce()
    test.assertEqual(market.escrow.total(), total)
    test.assertEqual(market.escrow.locked, {})
    for deal in market.deals.values():
        test.assertIn(deal.state, TERMINAL_STATES)

    confirmed = set()
    for record in market.trace():
        if record["op"] == "confirm_deal":
            confirmed.add(record["deal_id"])
        if record["op"] == "deliver_deal_key":
            test.assertIn(record["deal_id"], confirmed)
    for deal_id in market.envelopes:
        test.assertIn(deal_id, confirmed)

    replayed = DataMarket.replay(market.chain)
    test.assertEqual(replayed.state(), market.state())


class ScenarioTest(tf.test.TestCase):
    def test_scripted(self):
        result = run_scenario(Scenario.from_config(SCRIPTED))
        self.assertEqual(
            [event["accepted"] for event in result.events[:5]],
            [True, True, True, True, False],
        )
        self.assertEqual(result.events[4]["error"], "InsufficientBalanceError")
        self.assertEqual(result.events[3]["result"], "finalized")
        market = result.market
        self.assertEqual(market.escrow.balance("gateway"), 10)
        self.assertEqual(market.escrow.balance("hospital"), 40)

    def test_from_file_and_trace(self):
        path = os.path.join(self.get_temp_dir(), "scenario.json")
        with open(path, "w") as f:
            json.dump(SCRIPTED, f)
        scenario = Scenario.from_file(path)
        self.assertEqual(Scenario.from_config(scenario.get_config()), scenario)
        trace_path = os.path.join(self.get_temp_dir(), "trace.ndjson")
        first = run_scenario(scenario)
        first.write_trace(trace_path)
        with open(trace_path) as f:
            first_trace = f.read()
        run_scenario(scenario).write_trace(trace_path)
        with open(trace_path) as f:
            self.assertEqual(f.read(), first_trace)
        self.assertLen(first_trace.splitlines(), len(first.events))

    def test_tampered_batch_is_refunded(self):
        config = dict(SCRIPTED)
        config["operations"] = [
            request(10),
            {"op": "tamper", "batch_id": "b0"},
        ]
        market = run_scenario(Scenario.from_config(config)).market
        self.assertEqual(market.get_deal("deal-000000").state, "refunded")
        self.assertEqual(market.escrow.balance("hospital"), 50)

    def test_unconfirmable_deal_expires(self):
        config = dict(SCRIPTED)
        config["operations"] = [
            request(9),
        ]
        market = run_scenario(Scenario.from_config(config)).market
        self.assertEqual(market.get_deal("deal-000000").state, "refunded")
        self.assertEqual(market.round, 3)

    def test_without_quiescence(self):
        config = dict(SCRIPTED, operations=SCRIPTED["operations"][:2])
        result = run_scenario(Scenario.from_config(config), quiesce=False)
        self.assertEqual(
            result.market.get_deal("deal-000000").state, CONFIRMED
        )

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            Scenario.from_config({"participants": {}})
        with self.assertRaises(ConfigError):
            Scenario.from_config(
                {"participants": {"a": 1}, "batches": [{"owner": "z"}]}
            )
        with self.assertRaises(ConfigError):
            Scenario.from_config(
                {"participants": {"a": 1}, "operations": [{"op": "mint"}]}
            )
        with self.assertRaises(ConfigError):
            Scenario.from_config({"participants": {"a": 1}, "extra": 1})

    def test_random_traces(self):
        for seed in range(20):
            check_random_trace(self, seed)

    @pytest.mark.extra_large
    def test_random_traces_exhaustive(self):
        for seed in range(10000):
            check_random_trace(self, seed)
