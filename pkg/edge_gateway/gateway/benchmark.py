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
"""Latency benchmark of the gateway's per-chunk work."""

from absl import logging

from edge_gateway.access.benchmark import BenchReport
from edge_gateway.access.benchmark import LatencyRow
from edge_gateway.access.benchmark import timed
from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.dsp.wavelets import dwt
from edge_gateway.dsp.wavelets import wavelet_payload
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.pipeline import EdgeGateway
from edge_gateway.gateway.stages import RAW_DECIMALS
from edge_gateway.gateway.stages import analyze_chunk
from edge_gateway.gateway.stages import monitor_ingest
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import beats_from_signal
from edge_gateway.models.ecg_cnn.ecg_cnn_training import infer
from edge_gateway.utils.errors import ParameterError

PIPELINE_OPERATIONS = (
    "feature_extraction",
    "triage",
    "arrhythmia_detection",
    "wavelet_compression",
    "batch_commit",
)


def bench_pipeline(iterations=10, knowledge=None, heart_rate=75.0):
    """Time the stages a gateway runs for every chunk.

    Each iteration takes one synthetic chunk of `chunk_seconds` through
    feature extraction, triage, CNN classification of its beats and wavelet
    compression, then commits it as a one-record batch: encryption, ledger
    append and market listing.

    Args:
        iterations: int. Chunks processed.
        knowledge: `KnowledgeBase`. Defaults to one over `GatewayConfig()`
            with bootstrapped models.
        heart_rate: float. Rate of the synthetic chunk in bpm.

    Returns:
        A `BenchReport` with one row per entry of `PIPELINE_OPERATIONS`.
    """
    if iterations < 1:
        raise ParameterError(
            f"`iterations` must be >= 1. Received: iterations={iterations}"
        )
    if knowledge is None:
        knowledge = KnowledgeBase(GatewayConfig())
    knowledge.load_models()
    config = knowledge.config
    triage = knowledge.require("triage_model")
    cnn = knowledge.require("cnn_model")
    recording = synthesize_ecg(
        config.chunk_seconds,
        heart_rate=heart_rate,
        sampling_rate=config.sampling_rate,
        seed=config.seed,
    )
    chunk = next(
        monitor_ingest(
            recording.signal, config.sampling_rate, config.chunk_seconds
        )
    )
    record = analyze_chunk(chunk, knowledge).feature_record(
        config.wavelet_levels
    )
    gateway = EdgeGateway(knowledge)

    samples = {name: [] for name in PIPELINE_OPERATIONS}
    for iteration in range(iterations):
        elapsed, analysis = timed(lambda: analyze_signal(chunk.signal))
        samples["feature_extraction"].append(elapsed)
        elapsed, _ = timed(lambda: triage.classify(analysis.beats))
        samples["triage"].append(elapsed)
        elapsed, _ = timed(
            lambda: infer(
                cnn, beats_from_signal(analysis.signal, analysis.marks.r_peaks)
            )
        )
        samples["arrhythmia_detection"].append(elapsed)
        elapsed, _ = timed(
            lambda: wavelet_payload(
                dwt(chunk.signal, config.wavelet_levels), RAW_DECIMALS
            )
        )
        samples["wavelet_compression"].append(elapsed)
        time_ms = chunk.end_ms * (iteration + 1)
        elapsed, _ = timed(lambda: gateway.commit_batch([record], time_ms))
        samples["batch_commit"].append(elapsed)

    algorithms = {
        "feature_extraction": "analyze_signal",
        "triage": type(triage).__name__,
        "arrhythmia_detection": type(cnn).__name__,
        "wavelet_compression": f"db4-level{config.wavelet_levels}",
        "batch_commit": "chacha20poly1305+chain",
    }
    rows = [
        LatencyRow.from_samples(name, algorithms[name], samples[name])
        for name in PIPELINE_OPERATIONS
    ]
    logging.info(
        "Benchmarked %d chunks, chain height %d.",
        iterations,
        gateway.chain.height,
    )
    return BenchReport(rows)
