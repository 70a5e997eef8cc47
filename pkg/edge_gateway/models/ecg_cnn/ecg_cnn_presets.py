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

# Overrides of `ecg_cnn_mitbih` for the network a gateway trains on
# synthetic beats when no model file is configured.
BOOTSTRAP_CONFIG = {"conv_filters": 8, "fc_neurons": 32}

# Architectures for the heartbeat classifier.
backbone_presets = {
    "ecg_cnn_mitbih": {
        "config": {
            "sequence_length": 187,
            "num_channels": 1,
            "conv_filters": 64,
            "receptive_field": 2,
            "stride": 1,
            "conv_dropout": 0.4,
            "pool_size": 2,
            "num_conv_layers": 2,
            "fc_neurons": 512,
            "fc_dropout": 0.2,
            "output_classes": 5,
            "precision": "float64",
        },
        "description": (
            "Two convolutional blocks of 64 kernels with a receptive field "
            "of 2 and a 512 neuron hidden layer, classifying single-lead "
            "beats of 187 samples (125 Hz) into five heartbeat groups."
        ),
    },
    "ecg_cnn_mitbih_float32": {
        "config": {
            "sequence_length": 187,
            "num_channels": 1,
            "conv_filters": 64,
            "receptive_field": 2,
            "stride": 1,
            "conv_dropout": 0.4,
            "pool_size": 2,
            "num_conv_layers": 2,
            "fc_neurons": 512,
            "fc_dropout": 0.2,
            "output_classes": 5,
            "precision": "float32",
        },
        "description": (
            "Same architecture as `ecg_cnn_mitbih` computed in 32-bit "
            "floating point."
        ),
    },
}
