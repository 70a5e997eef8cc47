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
"""Buffering of processed records into periodic batches."""

import threading

from edge_gateway.utils.errors import ParameterError


class DataBatchBuffer:
    """Pending records flushed at multiples of the batch period.

    Analyzed chunks are stored as wavelet approximation bands. Once a
    batch has processed `sample_budget` samples, further chunks are kept
    raw until the next flush.

    Args:
        period_ms: int. Batch period `T` in ms.
        wavelet_levels: int. Decomposition levels of the stored chunks.
        sample_budget: optional int. Samples one batch may process.
    """

    def __init__(self, period_ms, wavelet_levels=2, sample_budget=None):
        if wavelet_levels < 1:
            raise ParameterError(
                "`wavelet_levels` must be >= 1. "
                f"Received: wavelet_levels={wavelet_levels}"
            )
        if sample_budget is not None and sample_budget < 0:
            raise ParameterError(
                "`sample_budget` must be None or >= 0. "
                f"Received: sample_budget={sample_budget}"
            )
        self.pending = []
        self.wavelet_levels = int(wavelet_levels)
        self.sample_budget = sample_budget
        self.processed_samples = 0
        self.period_ms = 0
        self.next_boundary = 0
        self.set_period(period_ms)
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.pending)

    def set_period(self, period_ms):
        """Change `T`. The next boundary is one new period after the last."""
        if period_ms <= 0:
            raise ParameterError(
                f"`period_ms` must be positive. Received: period_ms={period_ms}"
            )
        last_boundary = self.next_boundary - self.period_ms
        self.period_ms = int(period_ms)
        self.next_boundary = max(last_boundary, 0) + self.period_ms

    def add(self, analysis):
        """Buffer the record of a `ChunkAnalysis`.

        Chunks without a verdict, chunks too short to decompose and chunks
        past the sample budget are kept as raw samples.
        """
        size = len(analysis.chunk.signal)
        with self._lock:
            if self._compressible(analysis, size):
                record = analysis.feature_record(self.wavelet_levels)
                self.processed_samples += size
            else:
                record = analysis.raw_record()
            self.pending.append(record)

    def _compressible(self, analysis, size):
        if not analysis.analyzed or size < 2**self.wavelet_levels:
            return False
        if self.sample_budget is None:
            return True
        return self.processed_samples + size <= self.sample_budget

    def due(self, time_ms):
        return bool(self.pending) and time_ms >= self.next_boundary

    def flush(self, time_ms):
        """Take the pending records and move past `time_ms`'s boundary."""
        with self._lock:
            records, self.pending = self.pending, []
            self.processed_samples = 0
            while self.next_boundary <= time_ms:
                self.next_boundary += self.period_ms
        return records

    def drain(self):
        """Take whatever is pending at shutdown."""
        with self._lock:
            records, self.pending = self.pending, []
            self.processed_samples = 0
        return records
