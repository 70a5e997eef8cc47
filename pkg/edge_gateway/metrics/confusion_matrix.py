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
"""Confusion matrix metric and the classification report built from it."""

import dataclasses
import json

import numpy as np
import tensorflow as tf
from tensorflow import keras

from edge_gateway.metrics.reference_results import CLASS_SUPPORT
from edge_gateway.metrics.reference_results import METRIC_NAMES
from edge_gateway.metrics.reference_results import REFERENCE_RESULTS
from edge_gateway.utils.errors import DataError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError


@keras.utils.register_keras_serializable(package="edge_gateway")
class ConfusionMatrix(keras.metrics.Metric):
    """Streaming confusion matrix.

    Rows index the true class and columns the predicted class. `y_pred` may
    hold class indices (`[batch]`) or per-class scores (`[batch, classes]`),
    in which case the highest score wins.

    Args:
        num_classes: int. Number of classes.
        dtype: string or `tf.dtypes.DType`. Dtype of the counts.
        name: string. Name of the metric instance.

    Examples:
    >>> metric = edge_gateway.metrics.ConfusionMatrix(num_classes=3)
    >>> metric.update_state([0, 1, 2, 2], [0, 2, 2, 2])
    >>> metric.result()
    <tf.Tensor: shape=(3, 3), dtype=float64, numpy=
    array([[1., 0., 0.],
           [0., 0., 1.],
           [0., 0., 2.]])>
    """

    def __init__(
        self,
        num_classes=5,
        dtype="float64",
        name="confusion_matrix",
        **kwargs,
    ):
        super().__init__(name=name, dtype=dtype, **kwargs)
        if num_classes < 2:
            raise ParameterError(
                "`num_classes` must be >= 2. "
                f"Received: num_classes={num_classes}"
            )
        self.num_classes = num_classes
        self._counts = self.add_weight(
            name="counts",
            shape=(num_classes, num_classes),
            initializer="zeros",
            dtype=self.dtype,
        )

    def update_state(self, y_true, y_pred, sample_weight=None):
        y_true = tf.reshape(tf.cast(y_true, tf.int64), [-1])
        y_pred = tf.convert_to_tensor(y_pred)
        if y_pred.shape.rank == 2:
            y_pred = tf.argmax(y_pred, axis=-1)
        y_pred = tf.reshape(tf.cast(y_pred, tf.int64), [-1])
        if sample_weight is not None:
            sample_weight = tf.reshape(sample_weight, [-1])
        counts = tf.math.confusion_matrix(
            y_true,
            y_pred,
            num_classes=self.num_classes,
            weights=sample_weight,
            dtype=self.dtype,
        )
        self._counts.assign_add(counts)

    def result(self):
        return tf.identity(self._counts)

    def reset_state(self):
        self._counts.assign(tf.zeros_like(self._counts))

    def get_config(self):
        config = super().get_config()
        config.update({"num_classes": self.num_classes})
        return config


@dataclasses.dataclass
class ClassificationReport:
    """Metrics derived from one confusion matrix.

    Per-class figures treat each class one-vs-rest. Macro averages are
    plain means over classes, weighted averages weigh each class by its
    true-class support.
    """

    confusion: np.ndarray
    per_class: dict
    macro: dict
    weighted: dict
    accuracy: float
    class_names: tuple = ()

    @property
    def support(self):
        return self.confusion.sum(axis=1).astype(np.int64)

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "confusion_matrix": self.confusion.astype(np.int64).tolist(),
            "per_class": {
                str(index): {**values, "support": int(support)}
                for (index, values), support in zip(
                    self.per_class.items(), self.support
                )
            },
            "macro": dict(self.macro),
            "weighted": dict(self.weighted),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_text(self):
        width = 36 if self.class_names else 14
        header = "".join(f"{name:>11}" for name in METRIC_NAMES)
        lines = [f"{'':<{width}}{header}{'support':>11}"]
        rows = []
        for (index, values), support in zip(
            self.per_class.items(), self.support
        ):
            label = str(index)
            if self.class_names:
                label = f"{index} {self.class_names[index]}"
            rows.append((label, values, int(support)))
        total = int(self.support.sum())
        rows.append(("macro avg", self.macro, total))
        rows.append(("weighted avg", self.weighted, total))
        for label, values, support in rows:
            cells = "".join(f"{values[name]:>11.4f}" for name in METRIC_NAMES)
            lines.append(f"{label:<{width}}{cells}{support:>11d}")
        lines.append(f"{'accuracy':<{width}}{self.accuracy:>11.4f}")
        return "\n".join(lines)

    def compare(self, reference="ecg_cnn"):
        """Side-by-side text of measured and published figures.

        Per-class rows end with the measured support next to the class's
        support in the published test split.

        Args:
            reference: string. One of `"ecg_cnn"`, `"unbalanced"`,
                `"oversampled"`, `"undersampled"`.
        """
        if reference not in REFERENCE_RESULTS:
            raise ParameterError(
                f"`reference` must be one of {sorted(REFERENCE_RESULTS)}. "
                f"Received: reference={reference}"
            )
        published = REFERENCE_RESULTS[reference]
        rows = [
            (
                str(index),
                self.per_class[index],
                published["per_class"][index],
                (int(support), CLASS_SUPPORT[index][1]),
            )
            for index, support in zip(self.per_class, self.support)
            if index in published["per_class"]
        ]
        averages = (("macro", "macro avg"), ("weighted", "weighted avg"))
        for key, label in averages:
            if key in published:
                rows.append((label, getattr(self, key), published[key], None))

        lines = [
            f"{'':<13}"
            + "".join(f"{name:>21}" for name in METRIC_NAMES)
            + f"{'support':>21}",
            f"{'':<13}"
            + "".join(f"{'measured / ref':>21}" for _ in METRIC_NAMES)
            + f"{'measured / ref':>21}",
        ]
        for label, measured, target, support in rows:
            cells = "".join(
                f"{measured[name]:>12.4f} / {ref:<6.4f}"
                for name, ref in zip(METRIC_NAMES, target)
            )
            if support is not None:
                cells += f"{support[0]:>12d} / {support[1]:<6d}"
            lines.append(f"{label:<13}{cells}".rstrip())
        return "\n".join(lines)


def _safe_ratio(numerator, denominator):
    return float(numerator / denominator) if denominator > 0 else 0.0


def classification_report(confusion, class_names=()):
    """Build a `ClassificationReport` from a square confusion matrix.

    Ratios with an empty denominator are reported as 0.

    Raises:
        ShapeError: `confusion` is not square.
        DataError: the matrix counts no samples.
    """
    confusion = np.asarray(confusion, dtype=np.float64)
    if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
        raise ShapeError(
            "`confusion` must be a square matrix. "
            f"Received: shape={confusion.shape}"
        )
    total = confusion.sum()
    if total <= 0:
        raise DataError("Cannot report on an empty test set.")

    per_class = {}
    for index in range(confusion.shape[0]):
        true_positive = confusion[index, index]
        false_negative = confusion[index].sum() - true_positive
        false_positive = confusion[:, index].sum() - true_positive
        true_negative = total - true_positive - false_negative - false_positive
        precision = _safe_ratio(true_positive, true_positive + false_positive)
        recall = _safe_ratio(true_positive, true_positive + false_negative)
        per_class[index] = {
            "accuracy": _safe_ratio(true_positive + true_negative, total),
            "precision": precision,
            "recall": recall,
            "f1": _safe_ratio(2 * precision * recall, precision + recall),
        }

    support = confusion.sum(axis=1)
    macro = {
        name: float(np.mean([values[name] for values in per_class.values()]))
        for name in METRIC_NAMES
    }
    weighted = {
        name: float(
            sum(
                values[name] * weight
                for values, weight in zip(per_class.values(), support)
            )
            / total
        )
        for name in METRIC_NAMES
    }
    return ClassificationReport(
        confusion=confusion,
        per_class=per_class,
        macro=macro,
        weighted=weighted,
        accuracy=float(np.trace(confusion) / total),
        class_names=tuple(class_names),
    )


def summary_table(reports):
    """One line of headline figures per named report.

    Args:
        reports: dict of run name to `ClassificationReport`, in the order
            the lines are printed.
    """
    lines = [
        f"{'run':<14}{'accuracy':>11}{'macro f1':>11}{'weighted f1':>13}"
    ]
    for name, report in reports.items():
        lines.append(
            f"{name:<14}{report.accuracy:>11.4f}"
            f"{report.macro['f1']:>11.4f}{report.weighted['f1']:>13.4f}"
        )
    return "\n".join(lines)
