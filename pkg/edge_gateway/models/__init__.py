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

from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import BeatDataset
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import BeatRecord
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import SamplingStrategy
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import beats_from_signal
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import load_beats
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import resample
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import stratified_split
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import stratified_subset
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import write_beats
from edge_gateway.models.ecg_cnn.ecg_cnn_models import CLASS_NAMES
from edge_gateway.models.ecg_cnn.ecg_cnn_models import EcgCNN
from edge_gateway.models.ecg_cnn.ecg_cnn_saving import load_model
from edge_gateway.models.ecg_cnn.ecg_cnn_saving import save_model
from edge_gateway.models.ecg_cnn.ecg_cnn_training import TrainedModel
from edge_gateway.models.ecg_cnn.ecg_cnn_training import backward_and_sgd_step
from edge_gateway.models.ecg_cnn.ecg_cnn_training import evaluate
from edge_gateway.models.ecg_cnn.ecg_cnn_training import infer
from edge_gateway.models.ecg_cnn.ecg_cnn_training import train_model
