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
"""Plan and Execute stages: alerts, notifications and batch commits."""

import time

from absl import logging

from edge_gateway.access.batch_cipher import NONCE_SIZE
from edge_gateway.access.batch_cipher import encrypt_batch
from edge_gateway.access.kem import X25519Kem
from edge_gateway.access.key_delivery import request_key
from edge_gateway.access.key_ring import KeyRing
from edge_gateway.access.signatures import Ed25519Signature
from edge_gateway.gateway import events as events_lib
from edge_gateway.gateway.batching import DataBatchBuffer
from edge_gateway.gateway.knowledge import FeedbackEntry
from edge_gateway.gateway.stages import PRIORITY_URGENT
from edge_gateway.gateway.stages import system_manage
from edge_gateway.ledger.chain import Chain
from edge_gateway.market.data_market import DataMarket
from edge_gateway.market.records import CONFIRMED
from edge_gateway.market.records import DISPUTED
from edge_gateway.market.records import REQUESTED
from edge_gateway.market.records import DeviceRegistration
from edge_gateway.triage.alerts import AlertEvent
from edge_gateway.triage.alerts import raise_alerts
from edge_gateway.triage.triage_model import VERDICT_ABNORMAL
from edge_gateway.utils.errors import EdgeGatewayError
from edge_gateway.utils.serialization import canonical_bytes
from edge_gateway.utils.serialization import derive_secret
from edge_gateway.utils.serialization import sha256

TRIAGE_METRIC = "triage"
ENCRYPTED_SUFFIX = "/encrypted"


def batch_nonce(batch_key):
    return sha256(b"nonce" + batch_key)[:NONCE_SIZE]


def _notification(alert):
    channel = "caregiver" if alert.priority >= PRIORITY_URGENT else "patient"
    return {
        "channel": channel,
        "metric": alert.metric,
        "priority": alert.priority,
        "source": alert.source,
    }


class EdgeGateway:
    """One gateway's keys, ledger view, market and event log.

    `plan_and_execute` consumes one `ChunkAnalysis` at a time, in chunk
    order. Everything the gateway emits is derived from the config seed, so
    two runs over the same chunks produce identical event logs.

    Args:
        knowledge: `KnowledgeBase` with its models loaded.
        chain: `Chain` to append to. A fresh chain by default.
        market: `DataMarket` on the same chain. A fresh market by default.
        retry_backoff: float. Base delay in seconds between append attempts,
            doubled on each retry.
    """

    def __init__(self, knowledge, chain=None, market=None, retry_backoff=0.0):
        self.knowledge = knowledge
        config = knowledge.config
        self.gateway_id = config.gateway_id
        self.key_ring = KeyRing.create(
            derive_secret(config.seed, config.gateway_id, "master")
        )
        self.signing_keys = self.key_ring.signing_key_pair(Ed25519Signature())
        self.kem = X25519Kem()
        self.kem_keys = self.kem.generate_keypair(
            seed=derive_secret(config.seed, config.gateway_id, "kem")
        )
        self.chain = chain if chain is not None else Chain()
        self.market = (
            market if market is not None else DataMarket(chain=self.chain)
        )
        self.buffer = DataBatchBuffer(
            int(config.batch_period * 1000),
            wavelet_levels=config.wavelet_levels,
            sample_budget=config.sample_budget,
        )
        self.event_log = events_lib.EventLog()
        self.retry_backoff = retry_backoff
        self.batch_ids = {}
        self.dead_letters = []
        self.last_time = 0
        self._num_batches = 0

    @property
    def events(self):
        return self.event_log.events

    def _emit(self, kind, payload, time_ms):
        return self.event_log.emit(kind, payload, time_ms)

    def _alerts(self, analysis, time_ms):
        config = self.knowledge.config
        alerts = raise_alerts(
            analysis.heart_rates,
            rules=config.alert_rules(),
            timestamp=time_ms,
            source=self.gateway_id,
        )
        if not alerts and analysis.verdict == VERDICT_ABNORMAL:
            observed = analysis.mean_heart_rate
            alerts = [
                AlertEvent(
                    priority=config.abnormal_priority,
                    metric=TRIAGE_METRIC,
                    observed=0.0 if observed is None else observed,
                    timestamp=time_ms,
                    source=self.gateway_id,
                )
            ]
        # At most one alert per chunk: the most urgent metric.
        return sorted(alerts, key=lambda alert: -alert.priority)[:1]

    def plan_and_execute(self, analysis):
        """Act on one analyzed chunk.

        Emits, in order: the ingest and analysis events, the chunk's alert
        with its notification, a reconfiguration when the feedback calls
        for one, and a batch commit when a period boundary has passed.

        Returns:
            The events emitted for this chunk.
        """
        chunk = analysis.chunk
        time_ms = chunk.end_ms
        self.last_time = max(self.last_time, time_ms)
        first = len(self.event_log)
        self._emit(
            events_lib.INGEST,
            {
                "chunk": chunk.index,
                "start_ms": chunk.start_ms,
                "samples": len(chunk.signal),
                "partial": chunk.partial,
            },
            time_ms,
        )
        self._emit(events_lib.ANALYSIS, analysis.summary(), time_ms)
        priority = 0
        for alert in self._alerts(analysis, time_ms):
            priority = alert.priority
            self._emit(events_lib.ALERT, alert.to_dict(), time_ms)
            self._emit(events_lib.NOTIFICATION, _notification(alert), time_ms)
        self.knowledge.record_feedback(
            FeedbackEntry(
                chunk_index=chunk.index,
                decision=analysis.verdict,
                priority=priority,
                cnn_class=analysis.cnn_class,
                ground_truth=chunk.ground_truth,
                timestamp=time_ms,
            )
        )
        delta = system_manage(self.knowledge)
        if delta:
            self._emit(
                events_lib.RECONFIG,
                {"delta": delta, "version": self.knowledge.version},
                time_ms,
            )
            if "batch_period" in delta:
                self.buffer.set_period(int(delta["batch_period"] * 1000))
        self.buffer.add(analysis)
        if self.buffer.due(time_ms):
            self.commit_batch(self.buffer.flush(time_ms), time_ms)
        return self.events[first:]

    def finish(self):
        """Commit whatever is still buffered at shutdown."""
        records = self.buffer.drain()
        if records:
            self.commit_batch(records, self.last_time)

    def _register(self, time_ms):
        if self.gateway_id in self.market.devices:
            return
        self.market.register_device(
            DeviceRegistration(
                device_id=self.gateway_id,
                owner_id=self.gateway_id,
                verification_key=self.signing_keys.public_key,
                signature_algorithm=self.signing_keys.algorithm_id,
                kem_public_key=self.kem_keys.public_key,
                kem_algorithm=self.kem_keys.algorithm_id,
                registered_at=time_ms,
            ),
            timestamp=time_ms,
        )

    def _append(self, body, data_type, time_ms):
        attempts = self.knowledge.config.max_append_attempts
        for attempt in range(1, attempts + 1):
            try:
                return self.chain.add(body, data_type, time_ms)
            except EdgeGatewayError as e:
                error = e
                delay = self.retry_backoff * 2 ** (attempt - 1)
                logging.warning(
                    "Ledger append failed (attempt %d of %d): %s. "
                    "Backing off %.3f s.",
                    attempt,
                    attempts,
                    e,
                    delay,
                )
                if delay > 0 and attempt < attempts:
                    time.sleep(delay)
        raise error

    def commit_batch(self, records, time_ms):
        """Encrypt `records` under the next child key and put them on chain.

        The ciphertext goes into a block tagged `<data_type>/encrypted` and
        is then listed on the market. A batch whose block cannot be appended
        after `max_append_attempts` is dead-lettered.

        Returns:
            The `BatchListing`, or `None` for a dead-lettered batch.
        """
        config = self.knowledge.config
        index = self._num_batches
        self._num_batches += 1
        batch_id = f"{self.gateway_id}-batch-{index:06d}"
        batch_key = self.key_ring.child_key(index)
        plaintext = canonical_bytes(
            {
                "batch_index": index,
                "gateway_id": self.gateway_id,
                "records": records,
            }
        )
        batch = encrypt_batch(
            batch_key,
            plaintext,
            batch_id,
            data_type=config.data_type,
            nonce=batch_nonce(batch_key),
        )
        body = batch.to_json().encode("utf-8")
        try:
            block = self._append(
                body, config.data_type + ENCRYPTED_SUFFIX, time_ms
            )
        except EdgeGatewayError as e:
            logging.error("Dead-lettered batch %s: %s", batch_id, e)
            self.dead_letters.append(batch)
            self._emit(
                events_lib.DEAD_LETTER,
                {
                    "attempts": config.max_append_attempts,
                    "batch_id": batch_id,
                    "error": f"{type(e).__name__}: {e}",
                    "records": len(records),
                },
                time_ms,
            )
            return None
        self._register(time_ms)
        listing = self.market.list_batch(
            self.gateway_id,
            batch,
            min_deposit=config.min_deposit,
            expected_digest=sha256(body),
            timestamp=time_ms,
        )
        self.batch_ids[batch_id] = index
        logging.info(
            "Committed batch %s (%d records) at height %d.",
            batch_id,
            len(records),
            block.height,
        )
        self._emit(
            events_lib.BLOCK_COMMITTED,
            {
                "batch_id": batch_id,
                "block_hash": block.block_hash,
                "height": block.height,
                "payload_digest": listing.payload_digest,
                "records": len(records),
            },
            time_ms,
        )
        return listing

    def trade(self, buyers):
        """Let every buyer trade for every listed batch.

        Each trade runs the whole protocol: deposit, settlement, key
        delivery, decryption by the buyer and finalization. A deal whose
        deposit misses the listing's condition is refunded at settlement.

        Args:
            buyers: sequence of dicts with `id`, `balance` and `deposit`.

        Returns:
            One dict per attempted trade.
        """
        seed = self.knowledge.config.seed
        time_ms = max(self.last_time, self.chain.tip.timestamp)
        trades = []
        for buyer in buyers:
            buyer_id = buyer["id"]
            key_ring = KeyRing.create(derive_secret(seed, buyer_id, "master"))
            signing_keys = key_ring.signing_key_pair(Ed25519Signature())
            kem_keys = self.kem.generate_keypair(
                seed=derive_secret(seed, buyer_id, "kem")
            )
            self.market.register_device(
                DeviceRegistration(
                    device_id=buyer_id,
                    owner_id=buyer_id,
                    verification_key=signing_keys.public_key,
                    signature_algorithm=signing_keys.algorithm_id,
                    kem_public_key=kem_keys.public_key,
                    kem_algorithm=kem_keys.algorithm_id,
                    registered_at=time_ms,
                ),
                balance=int(buyer["balance"]),
                timestamp=time_ms,
            )
            for batch_id, index in self.batch_ids.items():
                trade = {"batch_id": batch_id, "buyer_id": buyer_id}
                trades.append(trade)
                try:
                    deal = self.market.request_deal(
                        buyer_id, batch_id, int(buyer["deposit"]), time_ms
                    )
                except EdgeGatewayError as e:
                    trade["error"] = f"{type(e).__name__}: {e}"
                    continue
                while deal.state == REQUESTED:
                    self.market.settle(time_ms)
                    deal = self.market.get_deal(deal.deal_id)
                trade["deal_id"] = deal.deal_id
                if deal.state == CONFIRMED:
                    self._deliver(deal, index, signing_keys, kem_keys, time_ms)
                trade["state"] = self.market.get_deal(deal.deal_id).state
        return trades

    def _deliver(self, deal, index, buyer_signing_keys, buyer_kem_keys, now):
        seed = self.knowledge.config.seed
        request = request_key(
            buyer_signing_keys, deal.buyer_id, deal.batch_id, timestamp=now
        )
        self.market.deliver_deal_key(
            deal.deal_id,
            request,
            self.key_ring.child_key(index),
            self.signing_keys,
            now=now,
            entropy=derive_secret(seed, deal.deal_id, "kem"),
            timestamp=now,
        )
        try:
            self.market.open_deal(deal.deal_id, buyer_kem_keys.secret_key)
            satisfied = True
        except EdgeGatewayError:
            satisfied = False
        if self.market.finalize(deal.deal_id, satisfied, now) == DISPUTED:
            self.market.resolve_dispute(deal.deal_id, now)
