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
"""The `egw` command line.

Every verb maps onto one module entry point and writes its results into
`--out`. Settings resolve as built-in defaults, then the `--config` file,
then explicit flags. Exit codes: 0 on success, 2 on usage errors, 1 when
the command fails.
"""

import csv
import dataclasses
import json
import os
import sys

from absl import app
from absl import logging
from absl.flags import argparse_flags

from edge_gateway.access.benchmark import bench_crypto
from edge_gateway.access.kem import get_kem
from edge_gateway.access.signatures import get_signature_scheme
from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.ecg_signal import read_signal_csv
from edge_gateway.dsp.features import read_features_csv
from edge_gateway.dsp.features import write_features_csv
from edge_gateway.dsp.wave_detection import heart_rate
from edge_gateway.gateway.benchmark import bench_pipeline
from edge_gateway.gateway.config import GatewayConfig
from edge_gateway.gateway.knowledge import KnowledgeBase
from edge_gateway.gateway.replay import run_replay
from edge_gateway.market.scenario import Scenario
from edge_gateway.market.scenario import run_scenario
from edge_gateway.metrics.confusion_matrix import summary_table
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import SAMPLING_KINDS
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import SamplingStrategy
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import beats_from_signal
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import load_beats
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import resample
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import stratified_split
from edge_gateway.models.ecg_cnn.ecg_cnn_datasets import stratified_subset
from edge_gateway.models.ecg_cnn.ecg_cnn_models import CLASS_NAMES
from edge_gateway.models.ecg_cnn.ecg_cnn_models import EcgCNN
from edge_gateway.models.ecg_cnn.ecg_cnn_saving import load_model
from edge_gateway.models.ecg_cnn.ecg_cnn_saving import save_model
from edge_gateway.models.ecg_cnn.ecg_cnn_training import DEFAULT_PRESET
from edge_gateway.models.ecg_cnn.ecg_cnn_training import compare_sampling
from edge_gateway.models.ecg_cnn.ecg_cnn_training import evaluate
from edge_gateway.models.ecg_cnn.ecg_cnn_training import infer
from edge_gateway.models.ecg_cnn.ecg_cnn_training import train_model
from edge_gateway.triage.linear_svm import ABNORMAL
from edge_gateway.triage.linear_svm import NORMAL
from edge_gateway.triage.triage_model import CLASSIFIERS
from edge_gateway.triage.triage_model import TriageModel
from edge_gateway.utils.errors import ConfigError
from edge_gateway.utils.errors import EdgeGatewayError
from edge_gateway.utils.serialization import canonical_json

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Settings each verb reads, with their built-in defaults. `None` marks a
# setting without a default that must come from the config file or a flag.
DEFAULTS = {
    "ecg-extract": {
        "signal": None,
        "out": None,
        "band_low": 0.5,
        "band_high": 40.0,
        "wavelet_levels": 2,
    },
    "train": {
        "data": None,
        "out": None,
        "preset": DEFAULT_PRESET,
        "model": {},
        "seed": 0,
        "epochs": 20,
        "learning_rate": 0.01,
        "batch_size": 64,
        "momentum": 0.9,
        "sampling": "unbalanced",
        "subset": 1.0,
        "validation_fraction": 0.1,
    },
    "compare-sampling": {
        "data": None,
        "test": None,
        "out": None,
        "preset": DEFAULT_PRESET,
        "model": {},
        "seed": 0,
        "epochs": 20,
        "learning_rate": 0.01,
        "batch_size": 64,
        "momentum": 0.9,
        "subset": 1.0,
        "test_fraction": 0.2,
        "validation_fraction": 0.1,
    },
    "eval": {
        "model": None,
        "data": None,
        "out": None,
        "reference": "ecg_cnn",
    },
    "infer": {
        "model": None,
        "data": None,
        "signal": None,
        "out": None,
    },
    "simulate-market": {
        "scenario": None,
        "random_operations": 0,
        "seed": 0,
        "out": None,
    },
    "bench-crypto": {
        "iterations": 100,
        "kem": "X25519-HKDF-SHA256",
        "signature": "Ed25519",
        "out": None,
    },
    "bench-pipeline": {
        "iterations": 10,
        "seed": 0,
        "out": None,
    },
    "gateway-run": {
        "signal": None,
        "out": None,
        "seed": None,
        "threaded": False,
    },
    "train-triage": {
        "data": None,
        "out": None,
        "label_column": "label",
        "classifier": "svm",
        "seed": 0,
        "epochs": 50,
        "regularization": 0.01,
    },
}
REQUIRED = {
    "ecg-extract": ("signal", "out"),
    "train": ("data", "out"),
    "compare-sampling": ("data", "out"),
    "eval": ("model", "data", "out"),
    "infer": ("model", "out"),
    "simulate-market": ("out",),
    "bench-crypto": ("out",),
    "bench-pipeline": ("out",),
    "gateway-run": ("signal", "out"),
    "train-triage": ("data", "out"),
}


def _add_common(parser, config_help):
    parser.add_argument("--config", help=config_help)
    parser.add_argument("--out", help="Output directory.")


def _verb(verbs, name, description):
    return verbs.add_parser(
        name,
        help=description,
        description=description,
        inherited_absl_flags=None,
    )


def build_parser():
    parser = argparse_flags.ArgumentParser(
        prog="egw", description="Edge gateway healthcare stack."
    )
    verbs = parser.add_subparsers(dest="verb", metavar="VERB")
    verbs.required = True

    extract = _verb(
        verbs, "ecg-extract", "Detect waves and write per-beat features."
    )
    _add_common(extract, "JSON file of extraction settings.")
    extract.add_argument("--signal", help="Signal file (`fs=<Hz>` header).")
    extract.add_argument("--band-low", type=float, help="High-pass cut, Hz.")
    extract.add_argument("--band-high", type=float, help="Low-pass cut, Hz.")
    extract.add_argument(
        "--wavelet-levels", type=int, help="DWT levels used for denoising."
    )

    train = _verb(verbs, "train", "Train the heartbeat classifier.")
    _add_common(
        train,
        "`default`, a preset name, or a JSON file of training settings.",
    )
    train.add_argument("--data", help="Beat CSV with a trailing label.")
    train.add_argument("--seed", type=int, help="Training seed.")
    train.add_argument("--epochs", type=int, help="Training epochs.")
    train.add_argument("--learning-rate", type=float, help="SGD step size.")
    train.add_argument("--batch-size", type=int, help="Mini-batch size.")
    train.add_argument("--momentum", type=float, help="SGD momentum.")
    train.add_argument(
        "--sampling", choices=SAMPLING_KINDS, help="Class rebalancing."
    )
    train.add_argument(
        "--subset", type=float, help="Stratified fraction of the data used."
    )
    train.add_argument(
        "--validation-fraction", type=float, help="Held-out share per class."
    )

    compare = _verb(
        verbs,
        "compare-sampling",
        "Train once per sampling strategy and compare the test reports.",
    )
    _add_common(compare, "JSON file of comparison settings.")
    compare.add_argument("--data", help="Training beat CSV.")
    compare.add_argument(
        "--test", help="Test beat CSV. Defaults to a split of `--data`."
    )
    compare.add_argument("--seed", type=int, help="Training seed.")
    compare.add_argument("--epochs", type=int, help="Training epochs.")
    compare.add_argument(
        "--subset", type=float, help="Stratified fraction of the data used."
    )
    compare.add_argument(
        "--test-fraction",
        type=float,
        help="Share per class held out for testing without `--test`.",
    )

    evaluate_ = _verb(verbs, "eval", "Evaluate a saved classifier.")
    _add_common(evaluate_, "JSON file of evaluation settings.")
    evaluate_.add_argument("--model", help="Saved model file.")
    evaluate_.add_argument("--data", help="Labelled beat CSV.")
    evaluate_.add_argument(
        "--reference", help="Published figures to print alongside."
    )

    infer_ = _verb(verbs, "infer", "Classify beats.")
    _add_common(infer_, "JSON file of inference settings.")
    infer_.add_argument("--model", help="Saved model file.")
    inputs = infer_.add_mutually_exclusive_group()
    inputs.add_argument("--data", help="Beat CSV.")
    inputs.add_argument("--signal", help="Signal file, cut into beats.")

    market = _verb(verbs, "simulate-market", "Run a data-trade scenario.")
    _add_common(market, "JSON file of simulation settings.")
    market.add_argument("--scenario", help="Scenario JSON file.")
    market.add_argument(
        "--random-operations",
        type=int,
        help="Seeded random operations, used without `--scenario`.",
    )
    market.add_argument("--seed", type=int, help="Scenario seed.")

    bench = _verb(
        verbs, "bench-crypto", "Time the KEM and signature schemes."
    )
    _add_common(bench, "JSON file of benchmark settings.")
    bench.add_argument("--iterations", type=int, help="Repetitions.")
    bench.add_argument("--kem", help="KEM algorithm id.")
    bench.add_argument("--signature", help="Signature algorithm id.")

    bench_pipeline_ = _verb(
        verbs, "bench-pipeline", "Time the gateway's per-chunk stages."
    )
    _add_common(bench_pipeline_, "JSON file of benchmark settings.")
    bench_pipeline_.add_argument("--iterations", type=int, help="Chunks.")
    bench_pipeline_.add_argument("--seed", type=int, help="Gateway seed.")

    gateway = _verb(
        verbs, "gateway-run", "Replay a recording through the gateway."
    )
    _add_common(gateway, "Gateway config JSON file.")
    gateway.add_argument("--signal", help="Signal file (`fs=<Hz>` header).")
    gateway.add_argument("--seed", type=int, help="Overrides the config seed.")
    gateway.add_argument(
        "--threaded",
        action="store_true",
        default=None,
        help="Run the stages in threads.",
    )

    triage = _verb(verbs, "train-triage", "Fit the binary triage model.")
    _add_common(triage, "JSON file of training settings.")
    triage.add_argument("--data", help="Feature CSV with a label column.")
    triage.add_argument("--label-column", help="Name of the label column.")
    triage.add_argument(
        "--classifier", choices=CLASSIFIERS, help="Classifier kind."
    )
    triage.add_argument("--seed", type=int, help="Training seed.")
    triage.add_argument("--epochs", type=int, help="SVM epochs.")
    triage.add_argument(
        "--regularization", type=float, help="SVM regularization."
    )
    return parser


def _read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}")


def resolve_settings(verb, args):
    """Merge defaults, the config file and explicit flags for `verb`."""
    settings = dict(DEFAULTS[verb])
    config = getattr(args, "config", None)
    if config and verb == "train" and not os.path.isfile(config):
        if config != "default":
            settings["preset"] = config
    elif config and verb != "gateway-run":
        values = _read_json(config)
        unknown = set(values) - set(settings)
        if unknown:
            raise ConfigError(
                f"{config} has unknown settings {sorted(unknown)} for "
                f"`{verb}`. Expected some of {sorted(settings)}."
            )
        settings.update(values)
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _path(settings, name):
    return os.path.join(settings["out"], name)


def _write_json(path, value):
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_json(value) + "\n")


def ecg_extract(settings):
    signal = read_signal_csv(settings["signal"])
    analysis = analyze_signal(
        signal,
        band_low=settings["band_low"],
        band_high=settings["band_high"],
        num_levels=settings["wavelet_levels"],
    )
    marks = analysis.marks
    write_features_csv(_path(settings, "features.csv"), analysis.beats)
    rates = heart_rate(marks.r_peaks, signal.sampling_rate)
    _write_json(
        _path(settings, "waves.json"),
        {
            "heart_rate_bpm": rates,
            "p_peaks": marks.p_peaks,
            "r_peaks": marks.r_peaks,
            "sampling_rate": signal.sampling_rate,
            "t_peaks": marks.t_peaks,
        },
    )
    return {"beats": len(analysis.beats), "r_peaks": len(marks.r_peaks)}


def _model_config(settings):
    preset = settings["preset"]
    if preset not in EcgCNN.presets:
        raise ConfigError(
            f"`preset` must be one of {sorted(EcgCNN.presets)} or a config "
            f"file. Received: preset={preset}"
        )
    model_config = EcgCNN.presets[preset]["config"]
    model_config.update(settings["model"])
    return model_config


def _training_beats(settings):
    dataset = load_beats(settings["data"])
    if settings["subset"] < 1.0:
        dataset = stratified_subset(
            dataset, settings["subset"], seed=settings["seed"]
        )
    return dataset


def _train_kwargs(settings):
    return {
        "config": _model_config(settings),
        "epochs": settings["epochs"],
        "learning_rate": settings["learning_rate"],
        "batch_size": settings["batch_size"],
        "momentum": settings["momentum"],
        "validation_fraction": settings["validation_fraction"],
    }


def train(settings):
    seed = settings["seed"]
    kwargs = _train_kwargs(settings)
    dataset = resample(
        _training_beats(settings), SamplingStrategy(settings["sampling"], seed)
    )
    trained = train_model(dataset, seed=seed, **kwargs)
    save_model(trained, _path(settings, "model.egw"))
    _write_json(
        _path(settings, "history.json"),
        {"history": trained.history, "metrics": trained.metrics},
    )
    return trained.metrics


def eval_model(settings):
    trained = load_model(settings["model"])
    report = evaluate(trained, load_beats(settings["data"]))
    with open(_path(settings, "metrics.json"), "w", encoding="utf-8") as f:
        f.write(report.to_json() + "\n")
    text = report.to_text()
    if report.class_names and settings["reference"]:
        text += "\n\n" + report.compare(settings["reference"])
    with open(_path(settings, "report.txt"), "w", encoding="utf-8") as f:
        f.write(text + "\n")
    return {"accuracy": report.accuracy}


def compare_sampling_runs(settings):
    kwargs = _train_kwargs(settings)
    dataset = _training_beats(settings)
    if settings["test"]:
        test_dataset = load_beats(settings["test"])
    else:
        dataset, test_dataset = stratified_split(
            dataset, settings["test_fraction"], seed=settings["seed"]
        )
    reports = compare_sampling(
        dataset, test_dataset, seed=settings["seed"], **kwargs
    )
    _write_json(
        _path(settings, "sampling.json"),
        {kind: report.to_dict() for kind, report in reports.items()},
    )
    sections = [summary_table(reports)]
    for kind, report in reports.items():
        section = f"== {kind} ==\n" + report.to_text()
        if report.class_names:
            section += "\n\n" + report.compare(kind)
        sections.append(section)
    with open(_path(settings, "sampling.txt"), "w", encoding="utf-8") as f:
        f.write("\n\n".join(sections) + "\n")
    return {kind: report.accuracy for kind, report in reports.items()}


def infer_beats(settings):
    trained = load_model(settings["model"])
    if settings["data"]:
        beats = load_beats(settings["data"]).samples
    elif settings["signal"]:
        analysis = analyze_signal(read_signal_csv(settings["signal"]))
        beats = beats_from_signal(analysis.signal, analysis.marks.r_peaks)
    else:
        raise ConfigError("`infer` needs `data` or `signal`.")
    classes, probabilities = infer(trained, beats)
    path = _path(settings, "predictions.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["beat", "class", "class_name", "probability"])
        for index, (label, row) in enumerate(zip(classes, probabilities)):
            name = CLASS_NAMES[label] if label < len(CLASS_NAMES) else ""
            writer.writerow([index, int(label), name, repr(float(row[label]))])
    return {"beats": len(classes)}


def simulate_market(settings):
    if settings["scenario"]:
        scenario = Scenario.from_file(settings["scenario"])
    else:
        scenario = Scenario.random(
            settings["seed"], num_operations=settings["random_operations"]
        )
    result = run_scenario(scenario)
    result.write_trace(_path(settings, "trace.ndjson"))
    result.market.chain.dump(_path(settings, "chain.ndjson"))
    _write_json(_path(settings, "state.json"), result.market.state())
    return {
        "operations": len(result.events),
        "rejected": len(result.rejected),
        "height": result.market.chain.height,
    }


def bench(settings):
    report = bench_crypto(
        iterations=settings["iterations"],
        kem=get_kem(settings["kem"]),
        signature=get_signature_scheme(settings["signature"]),
    )
    with open(_path(settings, "bench.json"), "w", encoding="utf-8") as f:
        f.write(report.to_json() + "\n")
    logging.info("Crypto latencies:\n%s", report.to_text())
    return {"operations": len(report.rows)}


def bench_gateway(settings):
    knowledge = KnowledgeBase(GatewayConfig(seed=settings["seed"]))
    report = bench_pipeline(settings["iterations"], knowledge=knowledge)
    path = _path(settings, "bench_pipeline.json")
    with open(path, "w", encoding="utf-8") as f:
        f.write(report.to_json() + "\n")
    logging.info("Gateway latencies:\n%s", report.to_text())
    return {"operations": len(report.rows)}


def gateway_run(settings, config_path=None):
    config = GatewayConfig()
    if config_path:
        config = GatewayConfig.from_file(config_path)
    if settings["seed"] is not None:
        config = dataclasses.replace(config, seed=settings["seed"])
    result = run_replay(
        settings["signal"], config, threaded=bool(settings["threaded"])
    )
    result.write(settings["out"])
    return {
        "events": len(result.events),
        "alerts": sum(event.kind == "alert" for event in result.events),
        "height": result.chain.height,
    }


def train_triage(settings):
    beats, labels = read_features_csv(
        settings["data"], label_column=settings["label_column"]
    )
    labels = [ABNORMAL if label > 0 else NORMAL for label in labels]
    model = TriageModel.fit(
        beats,
        labels,
        classifier=settings["classifier"],
        seed=settings["seed"],
        regularization=settings["regularization"],
        epochs=settings["epochs"],
    )
    model.save(_path(settings, "triage.json"))
    return {"beats": len(beats)}


COMMANDS = {
    "ecg-extract": ecg_extract,
    "train": train,
    "compare-sampling": compare_sampling_runs,
    "eval": eval_model,
    "infer": infer_beats,
    "simulate-market": simulate_market,
    "bench-crypto": bench,
    "bench-pipeline": bench_gateway,
    "gateway-run": gateway_run,
    "train-triage": train_triage,
}


def dispatch(parser, args):
    """Run the verb in `args` and return the process exit code."""
    verb = args.verb
    try:
        settings = resolve_settings(verb, args)
    except (EdgeGatewayError, OSError) as e:
        return _fail(verb, e)
    missing = [key for key in REQUIRED[verb] if settings.get(key) is None]
    if missing:
        flags = ", ".join("--" + key.replace("_", "-") for key in missing)
        parser.error(f"{verb} requires {flags}")
    try:
        os.makedirs(settings["out"], exist_ok=True)
        if verb == "gateway-run":
            summary = gateway_run(settings, args.config)
        else:
            summary = COMMANDS[verb](settings)
    except (EdgeGatewayError, OSError) as e:
        return _fail(verb, e)
    logging.info("%s done: %s", verb, canonical_json(summary))
    return EXIT_OK


def _fail(verb, error):
    message = f"egw {verb}: {type(error).__name__}: {error}"
    logging.error(message)
    print(message, file=sys.stderr)
    return EXIT_FAILURE


def run(argv):
    """Parse `argv` (without the program name) and run it."""
    parser = build_parser()
    return dispatch(parser, parser.parse_args(argv))


def main():
    parser = build_parser()
    app.run(
        lambda args: dispatch(parser, args),
        flags_parser=lambda argv: parser.parse_args(argv[1:]),
    )


if __name__ == "__main__":
    main()
