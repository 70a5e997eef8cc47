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

from edge_gateway.market.data_market import DataMarket
from edge_gateway.market.escrow import EscrowAccount
from edge_gateway.market.records import BatchListing
from edge_gateway.market.records import Deal
from edge_gateway.market.records import DeviceRegistration
from edge_gateway.market.scenario import Scenario
from edge_gateway.market.scenario import ScenarioResult
from edge_gateway.market.scenario import ScenarioRunner
from edge_gateway.market.scenario import run_scenario
from edge_gateway.market.storage import StorageProvider
