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
"""Tests for the crypto latency benchmark."""

import json

import tensorflow as tf

from edge_gateway.access.benchmark import OPERATIONS
from edge_gateway.access.benchmark import bench_crypto
from edge_gateway.utils.errors import ParameterError


class BenchCryptoTest(tf.test.TestCase):
    def test_single_iteration(self):
        report = bench_crypto(iterations=1)
        self.assertLen(report.rows, 6)
        for row in report.rows:
            self.assertEqual(row.iterations, 1)
            self.assertEqual(row.mean_ms, row.p95_ms)

    def test_order_statistics(self):
        report = bench_crypto(iterations=20)
        for row in report.rows:
            self.assertLessEqual(row.min_ms, row.p50_ms)
            self.assertLessEqual(row.p50_ms, row.p95_ms)
            self.assertLessEqual(row.p95_ms, row.max_ms)
            self.assertBetween(row.mean_ms, row.min_ms, row.max_ms)

    def test_stable_structure(self):
        first = json.loads(bench_crypto(iterations=2).to_json())
        second = json.loads(bench_crypto(iterations=2).to_json())
        self.assertEqual(first["unit"], "ms")
        self.assertEqual(
            [row["operation"] for row in first["rows"]], list(OPERATIONS)
        )
        self.assertEqual(
            [(r["operation"], r["algorithm"]) for r in first["rows"]],
            [(r["operation"], r["algorithm"]) for r in second["rows"]],
        )
        self.assertIn("kem_encapsulate", bench_crypto(1).to_text())

    def test_invalid_iterations(self):
        with self.assertRaises(ParameterError):
            bench_crypto(iterations=0)
