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
"""Deposit escrow with unit conservation."""

import threading

from edge_gateway.utils.errors import IdempotencyError
from edge_gateway.utils.errors import InsufficientBalanceError
from edge_gateway.utils.errors import NotFoundError
from edge_gateway.utils.errors import ParameterError


def check_units(amount, name):
    if isinstance(amount, bool) or not isinstance(amount, int) or amount < 0:
        raise ParameterError(
            f"`{name}` must be a non-negative integer. "
            f"Received: {name}={amount!r}"
        )


class EscrowAccount:
    """Integer balances per party and deposits locked per deal.

    Units enter only through `open`; every other method moves them, so
    `total()` is constant after the accounts are opened.
    """

    def __init__(self):
        self.balances = {}
        self.locked = {}
        self._lock = threading.Lock()

    def total(self):
        return sum(self.balances.values()) + sum(self.locked.values())

    def balance(self, party):
        return self.balances.get(party, 0)

    def open(self, party, amount=0):
        check_units(amount, "amount")
        with self._lock:
            if party in self.balances:
                raise IdempotencyError(f"Account {party!r} already exists.")
            self.balances[party] = amount

    def lock(self, party, deal_id, amount):
        """Move `amount` from `party` into the escrow of `deal_id`."""
        check_units(amount, "amount")
        with self._lock:
            if party not in self.balances:
                raise NotFoundError(f"No account for {party!r}.")
            if deal_id in self.locked:
                raise IdempotencyError(f"Deal {deal_id} is already funded.")
            if self.balances[party] < amount:
                raise InsufficientBalanceError(
                    f"{party!r} holds {self.balances[party]} units, "
                    f"{amount} requested."
                )
            self.balances[party] -= amount
            self.locked[deal_id] = amount

    def release(self, deal_id, party):
        """Pay the escrow of `deal_id` out to `party`."""
        with self._lock:
            if deal_id not in self.locked:
                raise NotFoundError(f"Deal {deal_id} holds no escrow.")
            if party not in self.balances:
                raise NotFoundError(f"No account for {party!r}.")
            self.balances[party] += self.locked.pop(deal_id)

    def snapshot(self):
        with self._lock:
            return {
                "balances": dict(self.balances),
                "locked": dict(self.locked),
            }
