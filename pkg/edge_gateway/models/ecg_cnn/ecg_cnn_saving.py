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
"""`EGW1` model files.

Layout, all integers little-endian:

```
b"EGW1" | uint32 header size | header (canonical JSON)
        | float64 weight blocks in `model.weights` order | uint32 CRC-32
```

The header carries the format version, the `EcgCNN` config, the training
seed, the metric summary and the name and shape of every weight block. The
CRC covers every byte before it.
"""

import json
import struct
import zlib

import numpy as np
from absl import logging
from packaging import version

from edge_gateway.models.ecg_cnn.ecg_cnn_models import EcgCNN
from edge_gateway.models.ecg_cnn.ecg_cnn_training import TrainedModel
from edge_gateway.utils.errors import ChecksumError
from edge_gateway.utils.errors import ConfigMismatchError
from edge_gateway.utils.errors import FormatError
from edge_gateway.utils.serialization import canonical_bytes

MAGIC = b"EGW1"
FORMAT_VERSION = "1.0"
_SIZE = struct.Struct("<I")


def save_model(trained, path):
    """Write a `TrainedModel` to `path`."""
    model = trained.model
    weights = [np.asarray(w.numpy(), dtype="<f8") for w in model.weights]
    header = canonical_bytes(
        {
            "format_version": FORMAT_VERSION,
            "config": model.get_config(),
            "seed": trained.seed,
            "metrics": trained.metrics,
            "history": trained.history,
            "weights": [
                {"name": w.name, "shape": list(w.shape)} for w in model.weights
            ],
        }
    )
    payload = b"".join(
        [MAGIC, _SIZE.pack(len(header)), header]
        + [block.tobytes() for block in weights]
    )
    with open(path, "wb") as f:
        f.write(payload)
        f.write(_SIZE.pack(zlib.crc32(payload)))
    logging.info("Saved model to %s (%d bytes)", path, len(payload) + 4)


def _read_header(data, path):
    if len(data) < len(MAGIC) + 2 * _SIZE.size or not data.startswith(MAGIC):
        raise FormatError(f"{path} is not an EGW1 model file.")
    (header_size,) = _SIZE.unpack_from(data, len(MAGIC))
    header_end = len(MAGIC) + _SIZE.size + header_size
    if header_end + _SIZE.size > len(data):
        raise FormatError(f"{path} is truncated.")
    (checksum,) = _SIZE.unpack_from(data, len(data) - _SIZE.size)
    if zlib.crc32(data[: -_SIZE.size]) != checksum:
        raise ChecksumError(
            f"Checksum mismatch in {path}; the file is corrupted."
        )
    try:
        header = json.loads(data[len(MAGIC) + _SIZE.size : header_end])
    except ValueError as e:
        raise FormatError(f"Header of {path} is not valid JSON: {e}") from e
    file_version = version.parse(str(header.get("format_version", "0")))
    if file_version.major != version.parse(FORMAT_VERSION).major:
        raise FormatError(
            f"{path} has format version {file_version}, this reader "
            f"supports {FORMAT_VERSION}."
        )
    return header, header_end


def load_model(path, expected_config=None):
    """Read a `TrainedModel` written by `save_model`.

    Args:
        path: string.
        expected_config: optional dict of `EcgCNN` config entries the stored
            model must match, e.g. `{"output_classes": 5}`.

    Raises:
        FormatError: bad magic, unsupported version or truncated file.
        ChecksumError: the bytes were modified.
        ConfigMismatchError: the stored config disagrees with
            `expected_config`.
    """
    with open(path, "rb") as f:
        data = f.read()
    header, offset = _read_header(data, path)
    config = header["config"]
    for key, expected in (expected_config or {}).items():
        if config.get(key) != expected:
            raise ConfigMismatchError(
                f"{path} stores `{key}={config.get(key)}`, the pipeline "
                f"expects `{key}={expected}`."
            )

    model = EcgCNN.from_config(config)
    specs = header["weights"]
    if len(specs) != len(model.weights):
        raise ConfigMismatchError(
            f"{path} stores {len(specs)} weights, the model has "
            f"{len(model.weights)}."
        )
    end = len(data) - _SIZE.size
    values = []
    for spec, weight in zip(specs, model.weights):
        shape = tuple(spec["shape"])
        if shape != tuple(weight.shape):
            raise ConfigMismatchError(
                f"Weight {spec['name']} in {path} has shape {shape}, "
                f"expected {tuple(weight.shape)}."
            )
        size = 8 * int(np.prod(shape, dtype="int64"))
        if offset + size > end:
            raise FormatError(f"{path} is truncated.")
        block = np.frombuffer(data, dtype="<f8", count=size // 8, offset=offset)
        values.append(block.reshape(shape).astype(weight.dtype))
        offset += size
    if offset != end:
        raise FormatError(f"{path} has {end - offset} trailing bytes.")
    model.set_weights(values)
    return TrainedModel(
        model=model,
        seed=header.get("seed", 0),
        history=header.get("history", {}),
        metrics=header.get("metrics", {}),
    )
