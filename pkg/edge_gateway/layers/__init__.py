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

from edge_gateway.layers.activations import leaky_relu
from edge_gateway.layers.activations import relu
from edge_gateway.layers.activations import softmax
from edge_gateway.layers.activations import softmax_argmax
from edge_gateway.layers.batch_normalization import BatchNormalization
from edge_gateway.layers.batch_normalization import batchnorm_forward
from edge_gateway.layers.conv1d import Conv1D
from edge_gateway.layers.conv1d import conv1d_forward
from edge_gateway.layers.conv1d import conv_output_size
from edge_gateway.layers.conv1d import literal_conv_output_size
from edge_gateway.layers.dense import Dense
from edge_gateway.layers.dense import dense_forward
from edge_gateway.layers.dropout import Dropout
from edge_gateway.layers.dropout import dropout
from edge_gateway.layers.gradient_check import gradient_check
from edge_gateway.layers.max_pooling import MaxPooling1D
from edge_gateway.layers.max_pooling import maxpool1d
