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
"""Tests for the Monitor, Analyze and System Management stages."""

from unittest import mock

import numpy as np
import tensorflow as tf
from absl.testing import parameterized

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.gateway_testing import FixedTriage
from edge_gateway.gateway.knowledge import FeedbackEntry
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.knowledge import bootstrap_ecg_cnn
from edge_gateway.gateway.stages import analyze_chunk
from edge_gateway.gateway.stages import monitor_ingest
from edge_gateway.gateway.stages import system_manage
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import StateError


class MonitorIngestTest(tf.test.TestCase):
    def test_partial_last_chunk(self):
        signal = EcgSignal(np.zeros((12500,)), 500)
        chunks = list(monitor_ingest(signal, 500))
        self.assertEqual([len(c.signal) for c in chunks], [5000, 5000, 2500])
        self.assertEqual([c.partial for c in chunks], [False, False, True])
        self.assertEqual([c.start_ms for c in chunks], [0, 10000, 20000])
        self.assertEqual(chunks[-1].end_ms, 25000)

    def test_exact_chunk(self):
        chunks = list(monitor_ingest(EcgSignal(np.zeros((5000,)), 500), 500))
        self.assertLen(chunks, 1)
        self.assertFalse(chunks[0].partial)

    def test_empty_stream(self):
        self.assertEmpty(list(monitor_ingest(EcgSignal([], 500), 500)))

    def test_chunks_are_cut_on_demand(self):
        signal = EcgSignal(np.zeros((15000,)), 500)
        original = EcgSignal.with_samples
        with mock.patch.object(
            EcgSignal,
            "with_samples",
            autospec=True,
            side_effect=original,
        ) as with_samples:
            chunks = monitor_ingest(signal, 500)
            self.assertEqual(with_samples.call_count, 0)
            self.assertEqual(next(chunks).index, 0)
            self.assertEqual(with_samples.call_count, 1)
            self.assertEqual([c.index for c in chunks], [1, 2])

    def test_rate_mismatch(self):
        with self.assertRaisesRegex(ConfigError, "250 Hz"):
            monitor_ingest(EcgSignal(np.zeros((100,)), 250), 500)

    def test_ground_truth_by_majority(self):
        labels = np.zeros((10000,), dtype=bool)
        labels[6000:] = True
        chunks = monitor_ingest(
            EcgSignal(np.zeros((10000,)), 500), 500, labels=labels
        )
        self.assertEqual(
            [c.ground_truth for c in chunks], ["normal", "abnormal"]
        )


class AnalyzeChunkTest(tf.test.TestCase, parameterized.TestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.cnn = bootstrap_ecg_cnn(seed=0, epochs=1)

    def setUp(self):
        self.chunk = next(
            monitor_ingest(
                synthesize_ecg(10.0, heart_rate=60.0, noise_std=0.02).signal,
                500,
            )
        )

    def knowledge(self, verdict):
        return KnowledgeBase(GatewayConfig(), FixedTriage(verdict), self.cnn)

    def test_normal_chunk_has_no_class(self):
        analysis = analyze_chunk(self.chunk, self.knowledge("normal"))
        self.assertEqual(analysis.verdict, "normal")
        self.assertIsNone(analysis.cnn_class)
        self.assertNotIn("class", analysis.summary())
        self.assertGreaterEqual(len(analysis.heart_rates), 8)
        self.assertAllClose(
            analysis.heart_rates,
            np.full_like(analysis.heart_rates, 60.0),
            atol=1.0,
        )
        self.assertTrue(analysis.analyzed)

    def test_abnormal_chunk_is_classified(self):
        analysis = analyze_chunk(self.chunk, self.knowledge("abnormal"))
        self.assertIn(analysis.cnn_class, range(5))
        self.assertIn("class_name", analysis.summary())

    def test_flat_chunk_is_indeterminate(self):
        chunk = next(monitor_ingest(EcgSignal(np.zeros((5000,)), 500), 500))
        analysis = analyze_chunk(chunk, self.knowledge("abnormal"))
        self.assertEqual(analysis.verdict, "indeterminate")
        self.assertFalse(analysis.analyzed)
        self.assertIsNone(analysis.mean_heart_rate)

    def test_missing_models(self):
        with self.assertRaisesRegex(StateError, "triage model"):
            analyze_chunk(self.chunk, KnowledgeBase(GatewayConfig()))
        knowledge = KnowledgeBase(GatewayConfig(), FixedTriage("abnormal"))
        with self.assertRaisesRegex(StateError, "cnn model"):
            analyze_chunk(self.chunk, knowledge)


def _feedback(knowledge, priorities, ground_truth=None):
    start = len(knowledge.feedback)
    for offset, priority in enumerate(priorities):
        knowledge.record_feedback(
            FeedbackEntry(
                chunk_index=start + offset,
                decision="abnormal" if priority else "normal",
                priority=priority,
                ground_truth=ground_truth,
            )
        )


class SystemManageTest(tf.test.TestCase):
    def test_empty_feedback(self):
        knowledge = KnowledgeBase(GatewayConfig())
        self.assertEqual(system_manage(knowledge), {})
        self.assertEqual(knowledge.version, 1)

    def test_urgent_alerts_shorten_period(self):
        knowledge = KnowledgeBase(GatewayConfig())
        _feedback(knowledge, [3, 3])
        self.assertEqual(system_manage(knowledge), {})
        _feedback(knowledge, [3])
        self.assertEqual(system_manage(knowledge), {"batch_period": 30.0})
        self.assertEqual(knowledge.version, 2)
        self.assertEqual(system_manage(knowledge), {"batch_period": 15.0})
        self.assertEqual(system_manage(knowledge), {"batch_period": 10.0})
        self.assertEqual(system_manage(knowledge), {})
        self.assertEqual(knowledge.config.batch_period, 10.0)
        self.assertEqual(knowledge.version, 4)

    def test_quiet_window_restores_period(self):
        knowledge = KnowledgeBase(GatewayConfig(batch_period=20.0))
        _feedback(knowledge, [0] * 5)
        self.assertEqual(system_manage(knowledge), {})
        _feedback(knowledge, [0])
        self.assertEqual(system_manage(knowledge), {"batch_period": 40.0})
        self.assertEqual(system_manage(knowledge), {"batch_period": 60.0})
        self.assertEqual(system_manage(knowledge), {})

    def test_false_alarms_relax_lowest_threshold(self):
        knowledge = KnowledgeBase(GatewayConfig())
        _feedback(knowledge, [1, 1, 1], ground_truth="normal")
        self.assertEqual(
            system_manage(knowledge),
            {"heart_rate_thresholds": ((85.0, 1), (120.0, 3))},
        )
        self.assertEqual(
            knowledge.config.heart_rate_thresholds, ((85.0, 1), (120.0, 3))
        )

    def test_confirmed_alarms_keep_thresholds(self):
        knowledge = KnowledgeBase(GatewayConfig())
        _feedback(knowledge, [1, 1, 1], ground_truth="abnormal")
        self.assertEqual(system_manage(knowledge), {})

    def test_threshold_ceiling(self):
        config = GatewayConfig(heart_rate_thresholds=((97.0, 1), (120.0, 3)))
        knowledge = KnowledgeBase(config)
        _feedback(knowledge, [1, 1, 1], ground_truth="normal")
        self.assertEqual(
            system_manage(knowledge),
            {"heart_rate_thresholds": ((100.0, 1), (120.0, 3))},
        )
        self.assertEqual(system_manage(knowledge), {})
