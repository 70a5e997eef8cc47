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

from edge_gateway.gateway.batching import DataBatchBuffer
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.events import EventLog
from edge_gateway.gateway.events import PipelineEvent
from edge_gateway.gateway.knowledge import FeedbackEntry
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.pipeline import EdgeGateway
from edge_gateway.gateway.replay import ReplayResult
from edge_gateway.gateway.replay import run_replay
from edge_gateway.gateway.stages import Chunk
from edge_gateway.gateway.stages import ChunkAnalysis
from edge_gateway.gateway.stages import analyze_chunk
from edge_gateway.gateway.stages import monitor_ingest
from edge_gateway.gateway.stages import system_manage
