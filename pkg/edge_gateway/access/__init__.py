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

from edge_gateway.access.batch_cipher import EncryptedBatch
from edge_gateway.access.batch_cipher import decrypt_batch
from edge_gateway.access.batch_cipher import encrypt_batch
from edge_gateway.access.benchmark import BenchReport
from edge_gateway.access.benchmark import bench_crypto
from edge_gateway.access.kem import KEM
from edge_gateway.access.kem import OQSKEM
from edge_gateway.access.kem import KemKeyPair
from edge_gateway.access.kem import X25519Kem
from edge_gateway.access.kem import get_kem
from edge_gateway.access.key_delivery import KeyEnvelope
from edge_gateway.access.key_delivery import KeyRequest
from edge_gateway.access.key_delivery import deliver_key
from edge_gateway.access.key_delivery import open_envelope
from edge_gateway.access.key_delivery import request_key
from edge_gateway.access.key_delivery import verify_request
from edge_gateway.access.key_ring import KeyRing
from edge_gateway.access.key_ring import derive_child_key
from edge_gateway.access.signatures import Ed25519Signature
from edge_gateway.access.signatures import OQSSignature
from edge_gateway.access.signatures import SignatureScheme
from edge_gateway.access.signatures import SigningKeyPair
from edge_gateway.access.signatures import get_signature_scheme
