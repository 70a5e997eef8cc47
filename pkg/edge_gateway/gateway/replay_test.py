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
"""End-to-end tests of the gateway replay."""

import os

import numpy as np
import tensorflow as tf

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.ecg_signal import write_signal_csv
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.gateway_testing import arrhythmia_recording
from edge_gateway.gateway.knowledge import bootstrap_ecg_cnn
from edge_gateway.gateway.replay import run_replay
from edge_gateway.ledger.chain import Chain
from edge_gateway.market.data_market import DataMarket
from edge_gateway.triage.triage_model import bootstrap_triage_model
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import PipelineError


class LabelsEndingAt:
    """Per-sample labels that run out at `end`."""

    def __init__(self, end):
        self.end = end

    def __getitem__(self, key):
        if key.start >= self.end:
            raise IndexError(f"No labels past sample {self.end}.")
        return np.zeros((key.stop - key.start,), dtype=bool)


class RunReplayTest(tf.test.TestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.triage = bootstrap_triage_model(seed=0)
        cls.cnn = bootstrap_ecg_cnn(seed=0)
        cls.recording = arrhythmia_recording(seed=0)

    def replay(self, signal=None, config=None, **kwargs):
        return run_replay(
            self.recording.signal if signal is None else signal,
            config or GatewayConfig(),
            triage_model=self.triage,
            cnn_model=self.cnn,
            **kwargs,
        )

    def test_arrhythmia_raises_alert_and_commits(self):
        result = self.replay()
        kinds = [event.kind for event in result.events]
        self.assertEqual(kinds.count("ingest"), 6)
        alerts = [e.payload for e in result.events if e.kind == "alert"]
        self.assertNotEmpty(alerts)
        self.assertIn(3, [alert["priority"] for alert in alerts])
        self.assertIn("block_committed", kinds)
        self.assertLess(kinds.index("alert"), kinds.index("block_committed"))
        self.assertLen(result.knowledge.feedback, 6)
        result.chain.verify()

    def test_identical_runs_identical_logs(self):
        first = self.replay().to_ndjson()
        self.assertEqual(self.replay().to_ndjson(), first)

    def test_threaded_matches_sequential(self):
        sequential = self.replay().to_ndjson()
        self.assertEqual(self.replay(threaded=True).to_ndjson(), sequential)

    def test_market_replays_from_chain(self):
        config = GatewayConfig(
            buyers=[{"id": "hospital", "balance": 50, "deposit": 10}]
        )
        result = self.replay(config=config)
        self.assertNotEmpty(result.trades)
        for trade in result.trades:
            self.assertEqual(trade["state"], "finalized")
        replayed = DataMarket.replay(
            result.chain, storage=result.market.storage
        )
        self.assertEqual(replayed.state(), result.market.state())

    def test_ground_truth_reaches_feedback(self):
        result = self.replay(ground_truth=self.recording.abnormal_mask)
        truths = [entry.ground_truth for entry in result.knowledge.feedback]
        self.assertEqual(
            truths, ["normal"] * 3 + ["abnormal"] + ["normal"] * 2
        )

    def test_empty_signal(self):
        result = self.replay(signal=EcgSignal(np.zeros((0,)), 500))
        self.assertEmpty(result.events)
        self.assertLen(result.chain, 1)
        self.assertEqual(result.to_ndjson(), "")

    def test_signal_file_and_outputs(self):
        path = os.path.join(self.get_temp_dir(), "signal.csv")
        write_signal_csv(path, self.recording.signal)
        result = self.replay(signal=path)
        out = self.get_temp_dir()
        result.write(out)
        with open(os.path.join(out, "events.ndjson")) as f:
            self.assertEqual(f.read(), result.to_ndjson())
        restored = Chain.restore(os.path.join(out, "chain.ndjson"))
        self.assertEqual(restored.tip.block_hash, result.chain.tip.block_hash)
        self.assertTrue(os.path.exists(os.path.join(out, "market.json")))

    def test_errors_name_the_stage(self):
        signal = EcgSignal(np.zeros((5000,)), 250)
        for threaded in (False, True):
            with self.assertRaisesRegex(PipelineError, r"\[monitor\]") as e:
                self.replay(signal=signal, threaded=threaded)
            self.assertEqual(e.exception.stage, "monitor")
            self.assertIsInstance(e.exception.cause, ConfigError)

    def test_mid_stream_failure_is_attributed_to_monitor(self):
        for threaded in (False, True):
            with self.assertRaisesRegex(PipelineError, "sample 5000") as e:
                self.replay(
                    ground_truth=LabelsEndingAt(5000), threaded=threaded
                )
            self.assertEqual(e.exception.stage, "monitor")
            self.assertIsInstance(e.exception.cause, IndexError)

    def test_missing_file(self):
        with self.assertRaisesRegex(PipelineError, "missing.csv"):
            self.replay(signal=os.path.join(self.get_temp_dir(), "missing.csv"))

    def test_analyze_failure_is_attributed(self):
        with self.assertRaisesRegex(PipelineError, r"\[analyze\]"):
            run_replay(
                self.recording.signal,
                GatewayConfig(),
                threaded=True,
                triage_model=object(),
                cnn_model=self.cnn,
            )
