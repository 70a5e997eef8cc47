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

from edge_gateway import access
from edge_gateway import dsp
from edge_gateway import gateway
from edge_gateway import layers
from edge_gateway import ledger
from edge_gateway import market
from edge_gateway import metrics
from edge_gateway import models
from edge_gateway import triage
from edge_gateway import utils

__version__ = "0.1.0"
