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
"""Fixtures shared by the classifier tests."""

from edge_gateway.models.ecg_cnn.ecg_cnn_presets import BOOTSTRAP_CONFIG

# A smaller network that trains in seconds.
SMALL_CONFIG = dict(BOOTSTRAP_CONFIG)
