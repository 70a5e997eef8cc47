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
"""Exception types raised across the edge gateway stack.

Validation problems subclass `ValueError`, protocol and runtime problems
subclass `RuntimeError`. Every class also derives from `EdgeGatewayError`, so
callers (the CLI in particular) can catch the whole family at once.
"""


class EdgeGatewayError(Exception):
    """Root of all errors raised by `edge_gateway`."""


# Input validation.


class ParameterError(EdgeGatewayError, ValueError):
    pass


class EmptyInputError(EdgeGatewayError, ValueError):
    pass


class ShapeError(EdgeGatewayError, ValueError):
    pass


class StructureError(EdgeGatewayError, ValueError):
    pass


class FormatError(EdgeGatewayError, ValueError):
    """A file or wire payload could not be parsed."""


class ChecksumError(FormatError):
    pass


class ConfigMismatchError(FormatError):
    """A persisted artifact does not match the configuration using it."""


class DataError(EdgeGatewayError, ValueError):
    pass


class ConfigError(EdgeGatewayError, ValueError):
    pass


# Runtime state.


class StateError(EdgeGatewayError, RuntimeError):
    pass


class TrainingError(EdgeGatewayError, RuntimeError):
    pass


# Access scheme.


class AuthenticationError(EdgeGatewayError, RuntimeError):
    """Authenticated decryption failed."""


class AuthorizationError(EdgeGatewayError, RuntimeError):
    pass


class FreshnessError(AuthorizationError):
    pass


class SignatureError(AuthorizationError):
    pass


class DecapsulationError(EdgeGatewayError, RuntimeError):
    pass


class UnwrapError(AuthenticationError):
    pass


# Ledger.


class OrderingError(EdgeGatewayError, ValueError):
    pass


class ForkError(EdgeGatewayError, RuntimeError):
    pass


class TamperError(EdgeGatewayError, RuntimeError):
    pass


class IdempotencyError(EdgeGatewayError, RuntimeError):
    pass


class NotFoundError(EdgeGatewayError, KeyError):
    def __str__(self):
        # `KeyError` quotes its message by default.
        return str(self.args[0]) if self.args else ""


# Market.


class TransitionError(EdgeGatewayError, RuntimeError):
    pass


class InsufficientBalanceError(EdgeGatewayError, RuntimeError):
    pass


class IntegrityError(EdgeGatewayError, RuntimeError):
    pass


class StorageError(EdgeGatewayError, RuntimeError):
    pass


class PipelineError(EdgeGatewayError, RuntimeError):
    """An error raised inside a gateway stage, tagged with the stage name."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
