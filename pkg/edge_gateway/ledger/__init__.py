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

from edge_gateway.ledger.blocks import Block
from edge_gateway.ledger.blocks import BlockHeader
from edge_gateway.ledger.blocks import make_block
from edge_gateway.ledger.blocks import make_genesis
from edge_gateway.ledger.chain import Chain
from edge_gateway.ledger.consensus import Validator
from edge_gateway.ledger.consensus import select_proposer
from edge_gateway.ledger.sidechain import SideChainEntry
from edge_gateway.ledger.sidechain import SideChainStore
from edge_gateway.ledger.sidechain import record_sidechain
from edge_gateway.ledger.simnet import DeliveryReport
from edge_gateway.ledger.simnet import ReplicatedLedger
from edge_gateway.ledger.simnet import SimNet
from edge_gateway.ledger.simnet import SimNetConfig
from edge_gateway.ledger.simnet import gossip_broadcast
