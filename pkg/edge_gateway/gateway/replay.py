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
"""Deterministic end-to-end replay of a recording through the gateway."""

import dataclasses
import os
import queue
import threading
from typing import Any
from typing import List

from absl import logging

from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.ecg_signal import read_signal_csv
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.pipeline import EdgeGateway
from edge_gateway.gateway.stages import analyze_chunk
from edge_gateway.gateway.stages import monitor_ingest
from edge_gateway.ledger.chain import Chain
from edge_gateway.market.data_market import DataMarket
from edge_gateway.utils.errors import PipelineError
from edge_gateway.utils.serialization import canonical_json

MONITOR = "monitor"
ANALYZE = "analyze"
EXECUTE = "execute"
SHUTDOWN = "shutdown"
MARKET = "market"

_DONE = object()


@dataclasses.dataclass(eq=False)
class ReplayResult:
    """Everything a replay leaves behind."""

    events: List[Any]
    chain: Chain
    market: DataMarket
    knowledge: KnowledgeBase
    gateway: EdgeGateway
    trades: List[dict]

    def to_ndjson(self):
        return self.gateway.event_log.to_ndjson()

    def write(self, directory):
        """Write the event log, chain and market trace into `directory`."""
        self.gateway.event_log.write(os.path.join(directory, "events.ndjson"))
        self.chain.dump(os.path.join(directory, "chain.ndjson"))
        market = {"state": self.market.state(), "trades": self.trades}
        with open(
            os.path.join(directory, "market.json"), "w", encoding="utf-8"
        ) as f:
            f.write(canonical_json(market))


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except PipelineError:
        raise
    except Exception as e:
        raise PipelineError(name, e) from e


class _Failure:
    def __init__(self, error):
        self.error = error


def _monitor(chunks_fn):
    """Pull chunks one at a time, attributing failures to Monitor."""
    chunks = iter(_stage(MONITOR, chunks_fn))
    while True:
        chunk = _stage(MONITOR, next, chunks, _DONE)
        if chunk is _DONE:
            return
        yield chunk


def _run_sequential(chunks_fn, knowledge, gateway):
    for chunk in _monitor(chunks_fn):
        analysis = _stage(ANALYZE, analyze_chunk, chunk, knowledge)
        _stage(EXECUTE, gateway.plan_and_execute, analysis)


def _monitor_worker(chunks_fn, out):
    try:
        for chunk in _monitor(chunks_fn):
            out.put(chunk)
    except PipelineError as e:
        out.put(_Failure(e))
    out.put(_DONE)


def _analyze_worker(knowledge, inbox, out, stop):
    while True:
        item = inbox.get()
        if item is _DONE or isinstance(item, _Failure):
            out.put(item)
            if item is _DONE:
                return
            continue
        if stop.is_set():
            continue
        try:
            out.put(_stage(ANALYZE, analyze_chunk, item, knowledge))
        except PipelineError as e:
            out.put(_Failure(e))
            stop.set()


def _run_threaded(chunks_fn, knowledge, gateway):
    """Monitor and Analyze in worker threads, Execute on the caller's."""
    chunks, analyses = queue.Queue(), queue.Queue()
    stop = threading.Event()
    workers = [
        threading.Thread(
            target=_monitor_worker,
            args=(chunks_fn, chunks),
            name="egw-monitor",
            daemon=True,
        ),
        threading.Thread(
            target=_analyze_worker,
            args=(knowledge, chunks, analyses, stop),
            name="egw-analyze",
            daemon=True,
        ),
    ]
    for worker in workers:
        worker.start()
    failure = None
    while True:
        item = analyses.get()
        if item is _DONE:
            break
        if isinstance(item, _Failure):
            failure = failure or item.error
            stop.set()
            continue
        if failure is None:
            try:
                _stage(EXECUTE, gateway.plan_and_execute, item)
            except PipelineError as e:
                failure = e
                stop.set()
    for worker in workers:
        worker.join()
    if failure is not None:
        raise failure


def run_replay(
    signal,
    config=None,
    threaded=False,
    ground_truth=None,
    triage_model=None,
    cnn_model=None,
):
    """Run a recording through Monitor, Analyze and Plan/Execute.

    Args:
        signal: `EcgSignal` or path of a signal CSV.
        config: `GatewayConfig`. Defaults to `GatewayConfig()`.
        threaded: bool. Run the stages as threads joined by queues instead
            of one after another. Both modes produce the same events.
        ground_truth: optional boolean array, one entry per sample, True
            where the recording is abnormal.
        triage_model: optional `TriageModel`, overrides the config.
        cnn_model: optional CNN model, overrides the config.

    Returns:
        A `ReplayResult`.

    Raises:
        PipelineError: a stage failed, with the stage name attached.
    """
    config = config or GatewayConfig()
    if not isinstance(signal, EcgSignal):
        signal = _stage(MONITOR, read_signal_csv, signal)
    knowledge = KnowledgeBase(config, triage_model, cnn_model)
    _stage(ANALYZE, knowledge.load_models)
    gateway = EdgeGateway(knowledge)

    def chunks_fn():
        return monitor_ingest(
            signal,
            config.sampling_rate,
            config.chunk_seconds,
            labels=ground_truth,
        )

    logging.info(
        "Replaying %.1f s of signal (%s).",
        signal.duration,
        "threaded" if threaded else "sequential",
    )
    if threaded:
        _run_threaded(chunks_fn, knowledge, gateway)
    else:
        _run_sequential(chunks_fn, knowledge, gateway)
    _stage(SHUTDOWN, gateway.finish)
    trades = []
    if config.buyers and gateway.batch_ids:
        trades = _stage(MARKET, gateway.trade, config.buyers)
    return ReplayResult(
        events=list(gateway.events),
        chain=gateway.chain,
        market=gateway.market,
        knowledge=knowledge,
        gateway=gateway,
        trades=trades,
    )
