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
"""1D-CNN heartbeat classifier."""

import copy

from tensorflow import keras

from edge_gateway.layers.batch_normalization import BatchNormalization
from edge_gateway.layers.conv1d import Conv1D
from edge_gateway.layers.dense import Dense
from edge_gateway.layers.dropout import Dropout
from edge_gateway.layers.max_pooling import MaxPooling1D
from edge_gateway.models.ecg_cnn.ecg_cnn_presets import backbone_presets
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.python_utils import classproperty
from edge_gateway.utils.python_utils import format_docstring

# Class indices of the five heartbeat groups.
CLASS_NAMES = (
    "Normal",
    "Fusion of paced and normal",
    "Premature ventricular contraction",
    "Atrial premature",
    "Fusion of ventricular and normal",
)

PRECISIONS = ("float32", "float64")


def ecg_cnn_kernel_initializer(seed):
    """Uniform in `+-sqrt(6 / (fan_in + fan_out))`."""
    return keras.initializers.GlorotUniform(seed=seed)


@keras.utils.register_keras_serializable(package="edge_gateway")
class EcgCNN(keras.Model):
    """Resource-optimized 1D convolutional network for heartbeat classes.

    The network has an extraction part and a classification part. Each of
    the `num_conv_layers` extraction blocks normalizes its input with batch
    statistics, convolves it with `conv_filters` kernels of length
    `receptive_field` followed by ReLU, applies dropout and halves the time
    axis with max pooling. Convolutions use `"same"` padding, so at stride 1
    every block sees as many positions as its input has samples. The
    classification part flattens the feature maps into a hidden layer of
    `fc_neurons` leaky-ReLU units with dropout, followed by one output
    neuron per class.

    The model outputs logits. Use `edge_gateway.layers.softmax` for
    probabilities and `edge_gateway.layers.softmax_argmax` for classes.

    Args:
        sequence_length: int. Samples per beat.
        num_channels: int. ECG leads per sample.
        conv_filters: int. Kernels per convolutional layer.
        receptive_field: int. Kernel length.
        stride: int. Convolution stride.
        conv_dropout: float. Fraction of units dropped after each
            convolution while training.
        pool_size: int. Max pooling window.
        num_conv_layers: int. Number of extraction blocks.
        fc_neurons: int. Width of the hidden fully-connected layer.
        fc_dropout: float. Fraction of hidden units dropped while training.
        output_classes: int. Number of heartbeat classes.
        seed: int. Seeds weight initialization and dropout masks.
        precision: string. `"float64"` or `"float32"`.

    Examples:
    ```python
    model = edge_gateway.models.EcgCNN.from_preset("ecg_cnn_mitbih", seed=7)
    logits = model(tf.zeros((8, 187, 1), dtype="float64"))
    ```
    """

    def __init__(
        self,
        sequence_length=187,
        num_channels=1,
        conv_filters=64,
        receptive_field=2,
        stride=1,
        conv_dropout=0.4,
        pool_size=2,
        num_conv_layers=2,
        fc_neurons=512,
        fc_dropout=0.2,
        output_classes=5,
        seed=0,
        precision="float64",
        **kwargs,
    ):
        if precision not in PRECISIONS:
            raise ParameterError(
                f"`precision` must be one of {PRECISIONS}. "
                f"Received: precision={precision}"
            )
        for name, rate in (
            ("conv_dropout", conv_dropout),
            ("fc_dropout", fc_dropout),
        ):
            if not 0.0 <= rate < 1.0:
                raise ParameterError(
                    f"`{name}` must be in [0, 1). Received: {name}={rate}"
                )
        if num_conv_layers < 1 or output_classes < 2:
            raise ParameterError(
                "`num_conv_layers` must be >= 1 and `output_classes` >= 2. "
                f"Received: num_conv_layers={num_conv_layers}, "
                f"output_classes={output_classes}"
            )

        inputs = keras.Input(
            shape=(sequence_length, num_channels),
            dtype=precision,
            name="beats",
        )
        x = inputs
        for i in range(num_conv_layers):
            x = BatchNormalization(
                dtype=precision, name=f"conv_{i}_batch_norm"
            )(x)
            x = Conv1D(
                filters=conv_filters,
                kernel_size=receptive_field,
                strides=stride,
                padding="same",
                activation="relu",
                kernel_initializer=ecg_cnn_kernel_initializer(seed + i),
                dtype=precision,
                name=f"conv_{i}",
            )(x)
            x = Dropout(
                retain_probability=1.0 - conv_dropout,
                seed=seed + i,
                dtype=precision,
                name=f"conv_{i}_dropout",
            )(x)
            x = MaxPooling1D(
                pool_size=pool_size, dtype=precision, name=f"conv_{i}_pool"
            )(x)

        x = keras.layers.Flatten(dtype=precision, name="flatten")(x)
        x = Dense(
            fc_neurons,
            activation="leaky_relu",
            kernel_initializer=ecg_cnn_kernel_initializer(seed + 100),
            dtype=precision,
            name="hidden",
        )(x)
        x = Dropout(
            retain_probability=1.0 - fc_dropout,
            seed=seed + 100,
            dtype=precision,
            name="hidden_dropout",
        )(x)
        logits = Dense(
            output_classes,
            kernel_initializer=ecg_cnn_kernel_initializer(seed + 101),
            dtype=precision,
            name="logits",
        )(x)

        # Set default for `name` if none given
        if "name" not in kwargs:
            kwargs["name"] = "ecg_cnn"

        # Instantiate using Functional API Model constructor
        super().__init__(inputs=inputs, outputs=logits, **kwargs)
        # All references to `self` below this line
        self.sequence_length = sequence_length
        self.num_channels = num_channels
        self.conv_filters = conv_filters
        self.receptive_field = receptive_field
        self.stride = stride
        self.conv_dropout = conv_dropout
        self.pool_size = pool_size
        self.num_conv_layers = num_conv_layers
        self.fc_neurons = fc_neurons
        self.fc_dropout = fc_dropout
        self.output_classes = output_classes
        self.seed = seed
        self.precision = precision

    def get_config(self):
        return {
            "sequence_length": self.sequence_length,
            "num_channels": self.num_channels,
            "conv_filters": self.conv_filters,
            "receptive_field": self.receptive_field,
            "stride": self.stride,
            "conv_dropout": self.conv_dropout,
            "pool_size": self.pool_size,
            "num_conv_layers": self.num_conv_layers,
            "fc_neurons": self.fc_neurons,
            "fc_dropout": self.fc_dropout,
            "output_classes": self.output_classes,
            "seed": self.seed,
            "precision": self.precision,
            "name": self.name,
            "trainable": self.trainable,
        }

    @classmethod
    def from_config(cls, config):
        return cls(**config)

    @classproperty
    def presets(cls):
        return copy.deepcopy(backbone_presets)

    @classmethod
    @format_docstring(names=", ".join(backbone_presets))
    def from_preset(cls, preset, **kwargs):
        """Instantiate an `EcgCNN` from a preset architecture.

        Keyword arguments override entries of the preset config.

        Args:
            preset: string. Must be one of {{names}}.

        Examples:
        ```python
        model = EcgCNN.from_preset("ecg_cnn_mitbih")

        # Smaller hidden layer, same extraction part.
        model = EcgCNN.from_preset("ecg_cnn_mitbih", fc_neurons=128)
        ```
        """
        if preset not in cls.presets:
            raise ValueError(
                "`preset` must be one of "
                f"""{", ".join(cls.presets)}. Received: {preset}."""
            )
        config = cls.presets[preset]["config"]
        return cls.from_config({**config, **kwargs})
