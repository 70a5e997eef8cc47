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
"""Training, inference and evaluation of `EcgCNN` models."""

import dataclasses

import numpy as np
import tensorflow as tf
from absl import logging
from tensorflow import keras

from edge_gateway.layers.activations import softmax
from edge_gateway.metrics.confusion_matrix import ConfusionMatrix
from edge_gateway.metrics.confusion_matrix import classification_report
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import SAMPLING_KINDS
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import BeatDataset
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import SamplingStrategy
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import resample
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import stratified_split
from edge_gateway.models.ecg_cnn.ecg_cnn_models import CLASS_NAMES
from edge_gateway.models.ecg_cnn.ecg_cnn_models import EcgCNN
from edge_gateway.utils.errors import DataError
from edge_gateway.utils.errors import ParameterError
from edge_gateway.utils.errors import ShapeError
from edge_gateway.utils.errors import TrainingError

DEFAULT_PRESET = "ecg_cnn_mitbih"


@dataclasses.dataclass
class TrainedModel:
    """A fitted `EcgCNN` with its training record.

    Args:
        model: `EcgCNN`.
        seed: int. Seed the model was trained with.
        history: dict of per-epoch lists (`loss`, `accuracy` and, when a
            validation split was used, `val_accuracy`).
        metrics: dict. Summary figures stored alongside the weights.
    """

    model: EcgCNN
    seed: int = 0
    history: dict = dataclasses.field(default_factory=dict)
    metrics: dict = dataclasses.field(default_factory=dict)

    @property
    def config(self):
        return self.model.get_config()


def _as_beats(model, beats):
    """Shape `beats` as `[batch, sequence_length, channels]` model inputs."""
    if isinstance(beats, BeatDataset):
        beats = beats.samples
    beats = np.asarray(beats)
    if beats.ndim == 2:
        beats = beats[..., np.newaxis]
    expected = (model.sequence_length, model.num_channels)
    if beats.ndim != 3 or beats.shape[1:] != expected:
        raise ShapeError(
            f"Beats must have shape `[batch, {expected[0]}, {expected[1]}]`. "
            f"Received: shape={beats.shape}"
        )
    return tf.convert_to_tensor(beats, dtype=model.precision)


def _loss(labels, logits):
    return tf.reduce_mean(
        tf.nn.sparse_softmax_cross_entropy_with_logits(labels, logits)
    )


def backward_and_sgd_step(model, beats, labels, learning_rate, optimizer=None):
    """One gradient step of categorical cross-entropy on a batch.

    Gradients flow back through every layer of `model` in training mode
    (batch statistics, active dropout). Without an `optimizer` a plain SGD
    update `w -= learning_rate * grad` is applied.

    Returns:
        The loss before the update, as a float.

    Raises:
        TrainingError: the loss or a gradient is not finite.
    """
    beats = _as_beats(model, beats)
    labels = tf.convert_to_tensor(labels, dtype=tf.int64)
    with tf.GradientTape() as tape:
        logits = model(beats, training=True)
        loss = _loss(labels, logits)
    if not np.isfinite(loss.numpy()):
        raise TrainingError(
            f"Loss is not finite ({loss.numpy()}). Lower the learning rate."
        )
    gradients = tape.gradient(loss, model.trainable_variables)
    if optimizer is None:
        for variable, gradient in zip(model.trainable_variables, gradients):
            variable.assign_sub(learning_rate * gradient)
    else:
        optimizer.apply_gradients(zip(gradients, model.trainable_variables))
    return float(loss.numpy())


def _make_train_step(model, optimizer):
    @tf.function
    def train_step(beats, labels):
        with tf.GradientTape() as tape:
            logits = model(beats, training=True)
            loss = _loss(labels, logits)
            loss = tf.debugging.check_numerics(loss, "Training loss")
        gradients = tape.gradient(loss, model.trainable_variables)
        optimizer.apply_gradients(zip(gradients, model.trainable_variables))
        correct = tf.reduce_sum(
            tf.cast(tf.equal(tf.argmax(logits, axis=-1), labels), tf.int64)
        )
        return loss, correct

    return train_step


def train_model(
    dataset,
    config=None,
    epochs=20,
    learning_rate=0.01,
    batch_size=64,
    seed=0,
    momentum=0.9,
    validation_fraction=0.1,
):
    """Fit an `EcgCNN` on `dataset`.

    The model is built from `config` (defaults to the `ecg_cnn_mitbih`
    preset) and trained with mini-batch SGD on categorical cross-entropy.
    `validation_fraction` of every class is held out, and its accuracy is
    tracked per epoch. Runs are reproducible from `seed`.

    Args:
        dataset: `BeatDataset` of training beats.
        config: dict of `EcgCNN` arguments overriding the preset.
        epochs: int.
        learning_rate: float.
        batch_size: int.
        seed: int. Seeds initialization, dropout and batch order.
        momentum: float. SGD momentum, 0 for plain SGD.
        validation_fraction: float in [0, 1).

    Returns:
        A `TrainedModel`.

    Raises:
        DataError: `dataset` is empty.
        TrainingError: the loss diverged.
    """
    if len(dataset) == 0:
        raise DataError("Cannot train on an empty dataset.")
    if epochs < 0 or batch_size < 1 or learning_rate < 0:
        raise ParameterError(
            "`epochs` must be >= 0, `batch_size` >= 1 and `learning_rate` "
            f">= 0. Received: epochs={epochs}, batch_size={batch_size}, "
            f"learning_rate={learning_rate}"
        )
    keras.utils.set_random_seed(seed)
    model_config = EcgCNN.presets[DEFAULT_PRESET]["config"]
    model_config.update(config or {})
    model_config["seed"] = seed
    model = EcgCNN.from_config(model_config)

    train, validation = stratified_split(dataset, validation_fraction, seed)
    if len(train) == 0:
        train, validation = dataset, BeatDataset.from_records([])
    optimizer = keras.optimizers.SGD(
        learning_rate=learning_rate, momentum=momentum
    )
    train_step = _make_train_step(model, optimizer)
    beats = _as_beats(model, train).numpy()
    labels = train.labels
    rng = np.random.default_rng(seed)
    history = {"loss": [], "accuracy": []}
    if len(validation):
        history["val_accuracy"] = []

    for epoch in range(epochs):
        order = rng.permutation(len(train))
        total_loss = 0.0
        total_correct = 0
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            try:
                loss, correct = train_step(
                    tf.constant(beats[batch]), tf.constant(labels[batch])
                )
            except tf.errors.InvalidArgumentError as e:
                raise TrainingError(
                    f"Training diverged in epoch {epoch + 1}: {e.message}"
                ) from e
            total_loss += float(loss) * len(batch)
            total_correct += int(correct)
        history["loss"].append(total_loss / len(train))
        history["accuracy"].append(total_correct / len(train))
        message = (
            f"Epoch {epoch + 1}/{epochs}: loss={history['loss'][-1]:.4f}, "
            f"accuracy={history['accuracy'][-1]:.4f}"
        )
        if len(validation):
            predicted, _ = infer(model, validation)
            history["val_accuracy"].append(
                float(np.mean(predicted == validation.labels))
            )
            message += f", val_accuracy={history['val_accuracy'][-1]:.4f}"
        logging.info(message)

    metrics = {}
    for key, values in history.items():
        if values:
            metrics[f"final_{key}"] = values[-1]
    return TrainedModel(
        model=model, seed=seed, history=history, metrics=metrics
    )


def infer(model, beats, batch_size=256):
    """Classify beats with dropout disabled and moving batch statistics.

    Args:
        model: `EcgCNN` or `TrainedModel`.
        beats: `BeatDataset` or array of shape `[batch, sequence_length]`
            or `[batch, sequence_length, channels]`.

    Returns:
        `(classes, probabilities)`: int array `[batch]` and float array
        `[batch, output_classes]`.
    """
    if isinstance(model, TrainedModel):
        model = model.model
    beats = _as_beats(model, beats)
    probabilities = []
    for start in range(0, int(beats.shape[0]), batch_size):
        logits = model(beats[start : start + batch_size], training=False)
        probabilities.append(softmax(logits).numpy())
    if not probabilities:
        return np.zeros(0, "int64"), np.zeros((0, model.output_classes))
    probabilities = np.concatenate(probabilities)
    return np.argmax(probabilities, axis=-1), probabilities


def evaluate(model, dataset, batch_size=256):
    """Classification report of `model` on a labelled `dataset`.

    Raises:
        DataError: `dataset` is empty.
    """
    if isinstance(model, TrainedModel):
        model = model.model
    if len(dataset) == 0:
        raise DataError("Cannot evaluate on an empty test set.")
    predicted, _ = infer(model, dataset, batch_size)
    metric = ConfusionMatrix(num_classes=model.output_classes)
    metric.update_state(dataset.labels, predicted)
    class_names = ()
    if model.output_classes == len(CLASS_NAMES):
        class_names = CLASS_NAMES
    return classification_report(metric.result().numpy(), class_names)


def compare_sampling(
    dataset, test_dataset, kinds=SAMPLING_KINDS, seed=0, **train_kwargs
):
    """Train one model per sampling strategy and evaluate each.

    Every run rebalances `dataset` with its strategy, trains with the same
    `seed` and `train_kwargs`, and is scored on the untouched
    `test_dataset`.

    Args:
        dataset: `BeatDataset` of training beats.
        test_dataset: `BeatDataset` of test beats.
        kinds: sampling kinds to compare, in report order.
        seed: int. Seeds resampling and training.
        **train_kwargs: further arguments of `train_model`.

    Returns:
        A dict of sampling kind to `ClassificationReport`.
    """
    reports = {}
    for kind in kinds:
        balanced = resample(dataset, SamplingStrategy(kind, seed))
        logging.info("Training on %d %s beats.", len(balanced), kind)
        trained = train_model(balanced, seed=seed, **train_kwargs)
        reports[kind] = evaluate(trained, test_dataset)
    return reports
