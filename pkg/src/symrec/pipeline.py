"""Experiment orchestration: config files, stages, persistence, bundles.

A config file is YAML with three chained sections.  ``preprocessing``
names the raw JSON-lines corpus and the step queue, ``features`` names
its data source plus the data multiplication and feature list, and
``model`` names its data source plus type, topology and training
parameters.  Step and feature lists share one idiom: a list whose items
are ``Name: null`` or ``Name:`` followed by a list of single-key
parameter maps; the queue is ordered and may contain duplicates.
Section data sources either point at the producing section by name or
at a file a previous run wrote, and the chain must resolve all the way
to raw data.

``run_experiment`` executes preprocess -> augment -> featurize ->
standardize -> train -> evaluate, persists the model, standardization
and per-epoch log, and reports TOP1/TOP3/MER on the test split.  Runs
are deterministic per seed in reference mode (the default: everything
is single-threaded with a fixed processing order), so equal seeds give
byte-identical model files.

A self-contained classifier bundle (queue + features + standardization
+ model) is also written; the HTTP service and the classify CLI load
that single file.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from . import augment as augment_mod
from .dataset import DatasetSplits, load_corpus, split_dataset
from .errors import ConfigError, StageError
from .evaluate import default_equivalences, mer_error, topn_error
from .features import (
    Standardization,
    apply_standardization,
    compose,
    fit_standardization,
    spec_list_hash,
    specs_from_config,
    specs_to_config,
    total_dimension,
)
from .gtw import GtwTemplateStore
from .mlp import (
    MlpModel,
    TrainConfig,
    dae_pretrain,
    deserialize_model,
    init_model,
    predict_topk,
    serialize_model,
    slp_pretrain,
    train,
    write_training_log,
)
from .preprocess import PreprocessingQueue, PreprocessingStep
from .recording import Recording, SymbolTable, parse_recording, serialize_recording

__all__ = [
    "parse_step_entry",
    "queue_from_config",
    "ExperimentConfig",
    "parse_config",
    "run_experiment",
    "ExperimentResult",
    "ClassifierBundle",
    "load_bundle",
    "save_feature_cache",
    "load_feature_cache",
]

PROJECT_ROOT_ENV = "SYMREC_ROOT"


# ---------------------------------------------------------------------------
# config parsing


def parse_step_entry(item) -> tuple[str, dict]:
    """One step/feature entry -> (name, params).

    Accepted shapes: ``"Name"``, ``{"Name": None}``, ``{"Name": [{k: v},
    ...]}`` and ``{"Name": {k: v}}``.
    """
    if isinstance(item, str):
        return item, {}
    if not isinstance(item, dict) or len(item) != 1:
        raise ConfigError(f"expected a single-key step entry, got {item!r}")
    name, raw = next(iter(item.items()))
    if raw is None:
        return name, {}
    if isinstance(raw, dict):
        return name, dict(raw)
    if isinstance(raw, list):
        params = {}
        for sub in raw:
            if not isinstance(sub, dict) or len(sub) != 1:
                raise ConfigError(f"step {name}: bad parameter entry {sub!r}")
            params.update(sub)
        return name, params
    raise ConfigError(f"step {name}: bad parameter block {raw!r}")


def queue_from_config(items) -> PreprocessingQueue:
    if items is None:
        items = []
    if not isinstance(items, list):
        raise ConfigError("queue must be a list of steps")
    return PreprocessingQueue(
        [PreprocessingStep(*parse_step_entry(item)) for item in items]
    )


_AUGMENT_STEPS = {"Multiply", "Rotate"}


def _augment_from_config(items) -> list[tuple[str, dict]]:
    steps = []
    for item in items or []:
        name, params = parse_step_entry(item)
        if name not in _AUGMENT_STEPS:
            raise ConfigError(f"unknown data multiplication step {name!r}")
        steps.append((name, params))
    return steps


def _parse_topology(raw) -> list:
    """Parse ``"160:500:369"``; ``auto`` infers input/output widths."""
    if isinstance(raw, list):
        parts = [str(p) for p in raw]
    else:
        parts = str(raw).split(":")
    if len(parts) < 2:
        raise ConfigError(f"topology needs at least input and output: {raw!r}")
    out = []
    for part in parts:
        part = part.strip().lower()
        if part == "auto":
            out.append("auto")
        else:
            try:
                width = int(part)
            except ValueError:
                raise ConfigError(f"bad topology width {part!r}") from None
            if width < 1:
                raise ConfigError(f"topology widths must be >= 1: {raw!r}")
            out.append(width)
    return out


def _parse_regularization(raw):
    if raw in (None, "none"):
        return None
    if isinstance(raw, dict) and len(raw) == 1:
        kind, lam = next(iter(raw.items()))
        kind = str(kind).lower()
        if kind in ("l1", "l2"):
            return (kind, float(lam))
    raise ConfigError(f"bad regularization {raw!r} (use {{l1: lambda}} or {{l2: lambda}})")


def _train_config_from(raw: dict, default_seed: int) -> tuple[TrainConfig, str | None]:
    raw = dict(raw or {})
    known = {}
    known["learning_rate"] = float(raw.pop("learning-rate", raw.pop("learning_rate", 0.1)))
    known["momentum"] = float(raw.pop("momentum", 0.1))
    known["batch_size"] = int(raw.pop("batch-size", raw.pop("batch_size", 256)))
    known["epochs"] = int(raw.pop("epochs", 1000))
    known["mode"] = str(raw.pop("mode", "fixed_epochs"))
    known["newbob_decay"] = float(raw.pop("newbob-decay", raw.pop("newbob_decay", 0.5)))
    known["newbob_theta1"] = float(raw.pop("newbob-theta1", raw.pop("newbob_theta1", 0.5)))
    known["newbob_theta2"] = float(raw.pop("newbob-theta2", raw.pop("newbob_theta2", 0.5)))
    known["newbob_relative"] = bool(
        raw.pop("newbob-relative", raw.pop("newbob_relative", False))
    )
    known["regularization"] = _parse_regularization(raw.pop("regularization", None))
    known["seed"] = int(raw.pop("seed", default_seed))
    known["shuffle"] = bool(raw.pop("shuffle", True))
    pretraining = raw.pop("pretraining", None)
    if pretraining not in (None, "none", "slp", "dae"):
        raise ConfigError(f"unknown pretraining {pretraining!r} (use slp or dae)")
    corruption = float(raw.pop("corruption", 0.3))
    if raw:
        raise ConfigError(f"unknown training parameters: {sorted(raw)}")
    if pretraining == "none":
        pretraining = None
    return TrainConfig(**known), pretraining, corruption


@dataclass
class ExperimentConfig:
    """Parsed experiment description with the data-source chain."""

    raw_data: str | None
    raw_labels: str | None
    queue: PreprocessingQueue
    preprocessed_source: str | None  # path, when features chain from a file
    preprocessed_labels: str | None
    augment_steps: list
    feature_specs: list
    standardization_mode: str
    feature_source: str | None  # path, when the model chains from a cache dir
    model_type: str
    topology: list
    train_config: TrainConfig
    pretraining: str | None
    dae_corruption: float
    templates_per_symbol: int
    fractions: tuple[float, float, float]
    base_dir: Path

    def resolve_path(self, path_str: str) -> Path:
        path = Path(path_str)
        if path.is_absolute():
            return path
        root = os.environ.get(PROJECT_ROOT_ENV)
        base = Path(root) if root else self.base_dir
        return base / path


def parse_config(path) -> ExperimentConfig:
    """Parse and validate an experiment config file.

    Step and feature names, parameter ranges and the data-source chain
    are all checked here so a bad config fails before any stage runs.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping with sections")

    pre = doc.get("preprocessing") or {}
    feat = doc.get("features") or {}
    model = doc.get("model") or {}
    split = doc.get("split") or {}

    queue = queue_from_config(pre.get("queue"))
    raw_data = pre.get("data-source", pre.get("data_source"))
    raw_labels = pre.get("labels")
    if raw_data is not None and raw_labels is None:
        raw_labels = str(Path(raw_data).with_suffix("")) + ".labels.csv"

    feat_source = feat.get("data-source", feat.get("data_source", "preprocessing"))
    preprocessed_source = None
    preprocessed_labels = None
    if feat_source not in (None, "preprocessing"):
        preprocessed_source = str(feat_source)
        preprocessed_labels = feat.get("labels")
        if preprocessed_labels is None:
            preprocessed_labels = (
                str(Path(preprocessed_source).with_suffix("")) + ".labels.csv"
            )
    if not feat.get("features"):
        raise ConfigError("features section needs a non-empty feature list")
    feature_specs = specs_from_config(feat["features"])
    standardization_mode = str(feat.get("standardization", "none"))
    if standardization_mode not in ("none", "mean_only", "standardize"):
        raise ConfigError(f"unknown standardization mode {standardization_mode!r}")
    augment_steps = _augment_from_config(feat.get("data-multiplication"))

    model_source = model.get("data-source", model.get("data_source", "features"))
    feature_source = None
    if model_source not in (None, "features"):
        feature_source = str(model_source)
    model_type = str(model.get("type", "mlp")).lower()
    if model_type not in ("mlp", "gtw"):
        raise ConfigError(f"unknown model type {model_type!r}")
    topology = _parse_topology(model.get("topology", "auto:64:auto"))
    train_config, pretraining, corruption = _train_config_from(model.get("training"), 0)
    templates_per_symbol = int(model.get("templates-per-symbol", 50))
    if model_type == "gtw" and feature_source is not None:
        raise ConfigError(
            "gtw models match whole recordings; point the model data-source "
            "at 'features' (or a recording file), not at a feature cache"
        )

    fractions = tuple(split.get("fractions", (0.8, 0.1, 0.1)))
    if len(fractions) != 3:
        raise ConfigError("split fractions must have three entries")

    # the chain must ground out in real data somewhere
    if feature_source is None and preprocessed_source is None and raw_data is None:
        raise ConfigError(
            "unresolved data-source chain: model -> features -> preprocessing "
            "-> (missing raw data-source)"
        )
    return ExperimentConfig(
        raw_data=raw_data,
        raw_labels=raw_labels,
        queue=queue,
        preprocessed_source=preprocessed_source,
        preprocessed_labels=preprocessed_labels,
        augment_steps=augment_steps,
        feature_specs=feature_specs,
        standardization_mode=standardization_mode,
        feature_source=feature_source,
        model_type=model_type,
        topology=topology,
        train_config=train_config,
        pretraining=pretraining,
        dae_corruption=corruption,
        templates_per_symbol=templates_per_symbol,
        fractions=tuple(float(f) for f in fractions),
        base_dir=path.parent.resolve(),
    )


# ---------------------------------------------------------------------------
# feature cache

_CACHE_FORMAT = "symrec-features"


def save_feature_cache(path, x: np.ndarray, labels: np.ndarray, specs, symbols) -> None:
    """Dense feature matrix with a small identifying header."""
    meta = {
        "format": _CACHE_FORMAT,
        "version": 1,
        "feature_dim": int(x.shape[1]),
        "count": int(x.shape[0]),
        "spec_hash": spec_list_hash(specs),
        "symbols": {str(i): c for i, c in symbols.to_dict().items()},
    }
    np.savez(path, x=x, y=labels, meta=np.array(json.dumps(meta)))


def load_feature_cache(path, specs=None):
    """Load a cached feature matrix; optionally verify the feature list."""
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format") != _CACHE_FORMAT:
            raise ConfigError(f"{path} is not a feature cache")
        if specs is not None and meta["spec_hash"] != spec_list_hash(specs):
            raise ConfigError(
                f"{path} was built with a different feature list "
                f"({meta['spec_hash']} != {spec_list_hash(specs)})"
            )
        x = data["x"]
        y = data["y"]
    symbols = SymbolTable({int(k): v for k, v in meta["symbols"].items()})
    return x, y, symbols


# ---------------------------------------------------------------------------
# experiment stages


def _apply_augmentation(recordings: list[Recording], steps) -> list[Recording]:
    out = recordings
    for name, params in steps:
        if name == "Multiply":
            out = augment_mod.multiply(out, int(params.get("nr", 1)))
        else:
            out = augment_mod.rotate(
                out,
                float(params.get("min", -3.0)),
                float(params.get("max", 3.0)),
                int(params.get("num", 2)),
            )
    return out


def _featurize(recordings, specs, symbols) -> tuple[np.ndarray, np.ndarray]:
    if not recordings:
        return np.zeros((0, total_dimension(specs))), np.zeros(0, dtype=int)
    x = np.stack([compose(rec, specs) for rec in recordings])
    y = np.array([symbols.id_for(rec.label) for rec in recordings])
    return x, y


def _resolve_topology(topology, feature_dim: int, n_classes: int) -> list[int]:
    resolved = [
        feature_dim if (w == "auto" and i == 0)
        else n_classes if (w == "auto" and i == len(topology) - 1)
        else w
        for i, w in enumerate(topology)
    ]
    if any(w == "auto" for w in resolved[1:-1]):
        raise ConfigError("only the input and output widths may be 'auto'")
    if resolved[0] != feature_dim:
        raise ConfigError(
            f"topology input width {resolved[0]} != feature dimension {feature_dim}"
        )
    if resolved[-1] != n_classes:
        raise ConfigError(
            f"topology output width {resolved[-1]} != symbol count {n_classes}"
        )
    return resolved


@dataclass
class ExperimentResult:
    report: dict[str, float]
    history: list[dict]
    out_dir: Path | None
    model: MlpModel | None
    store: GtwTemplateStore | None
    bundle: "ClassifierBundle"


def _stage(name):
    class _StageGuard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, StageError):
                raise StageError(name, exc) from exc
            return False

    return _StageGuard()


def _load_feature_splits(config: ExperimentConfig):
    """Resolve a feature-cache data source written by ``featurize``."""
    cache_dir = config.resolve_path(config.feature_source)
    parts = {}
    for name in ("train", "validation", "test"):
        path = cache_dir / f"{name}.npz"
        if not path.exists():
            raise ConfigError(
                f"unresolved data-source chain: model -> feature cache "
                f"{path} not found"
            )
        parts[name] = load_feature_cache(path, config.feature_specs)
    x_train, y_train, symbols = parts["train"]
    x_valid, y_valid, _ = parts["validation"]
    x_test, y_test, _ = parts["test"]
    std_path = cache_dir / "standardization.json"
    if std_path.exists():
        with open(std_path) as fh:
            std = Standardization.from_dict(json.load(fh))
    else:
        dim = x_train.shape[1]
        std = Standardization(np.zeros(dim), np.ones(dim), "none")
    return (x_train, y_train), (x_valid, y_valid), (x_test, y_test), symbols, std


def run_experiment(
    config: ExperimentConfig,
    seed: int | None = None,
    out_dir=None,
    reference_mode: bool = True,
) -> ExperimentResult:
    """Run all stages and return the evaluation report.

    The data-source chain decides where work starts: a feature-cache
    directory (written by ``featurize``) skips straight to training
    with the cache's standardization; a preprocessed recording file
    skips the queue; raw data runs every stage.  ``seed`` overrides the
    config seed for splitting, initialization and shuffling.  When
    ``out_dir`` is given, the trained model, standardization, per-epoch
    training log, report and a self-contained classifier bundle are
    persisted there.  Reference mode keeps every stage single-threaded
    in a fixed order; it is the default and currently the only
    implementation, so equal seeds give byte-identical outputs.

    Note that the bundle always carries the config's queue: when
    training consumed already-preprocessed sources, served queries are
    still pushed through that queue, so keep the config's queue in sync
    with how the source files were produced.
    """
    del reference_mode  # stages are always deterministic and sequential
    train_config = config.train_config
    if seed is not None:
        train_config = replace(train_config, seed=int(seed))
    split_seed = train_config.seed

    pre_splits = None
    train_recs = None
    if config.feature_source is not None:
        with _stage("load"):
            train_part, valid_part, test_part, symbols, std = _load_feature_splits(config)
            x_train, y_train = train_part
            x_valid, y_valid = valid_part
            x_test, y_test = test_part
    else:
        with _stage("load"):
            if config.preprocessed_source is not None:
                source = config.resolve_path(config.preprocessed_source)
                if not source.exists():
                    raise ConfigError(
                        f"unresolved data-source chain: features -> preprocessed "
                        f"recordings {source} not found"
                    )
                corpus = load_corpus(
                    source, config.resolve_path(config.preprocessed_labels)
                )
            elif config.raw_data is not None:
                corpus = load_corpus(
                    config.resolve_path(config.raw_data),
                    config.resolve_path(config.raw_labels),
                )
            else:
                raise ConfigError(
                    "unresolved data-source chain: no feature cache, no "
                    "preprocessed recordings, no raw data-source"
                )
            symbols = corpus.symbols

        with _stage("split"):
            splits = split_dataset(corpus.recordings, config.fractions, seed=split_seed)

        with _stage("preprocess"):
            if config.preprocessed_source is not None:
                pre_splits = splits  # source recordings are already preprocessed
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("once")
                    pre_splits = DatasetSplits(
                        *[
                            [config.queue.apply(rec) for rec in part]
                            for part in (splits.train, splits.validation, splits.test)
                        ]
                    )

        with _stage("augment"):
            train_recs = _apply_augmentation(pre_splits.train, config.augment_steps)

        with _stage("featurize"):
            x_train, y_train = _featurize(train_recs, config.feature_specs, symbols)
            x_valid, y_valid = _featurize(
                pre_splits.validation, config.feature_specs, symbols
            )
            x_test, y_test = _featurize(pre_splits.test, config.feature_specs, symbols)

        with _stage("standardize"):
            std = fit_standardization(x_train, mode=config.standardization_mode)
            x_train = apply_standardization(std, x_train)
            if x_valid.shape[0]:
                x_valid = apply_standardization(std, x_valid)
            if x_test.shape[0]:
                x_test = apply_standardization(std, x_test)

    model = None
    store = None
    history: list[dict] = []
    if config.model_type == "mlp":
        with _stage("train"):
            topology = _resolve_topology(
                config.topology, x_train.shape[1], len(symbols)
            )
            validation = (x_valid, y_valid) if x_valid.shape[0] else None
            if config.pretraining == "slp":
                model = slp_pretrain(
                    topology,
                    (x_train, y_train),
                    train_config,
                    validation,
                    symbols=symbols,
                )
            elif config.pretraining == "dae":
                model = dae_pretrain(
                    topology,
                    x_train,
                    train_config,
                    corruption=config.dae_corruption,
                    symbols=symbols,
                )
            else:
                model = init_model(topology, seed=train_config.seed, symbols=symbols)
            model, history = train(model, (x_train, y_train), train_config, validation)
    else:
        with _stage("train"):
            store = GtwTemplateStore.from_labeled(
                train_recs,
                [symbols.id_for(r.label) for r in train_recs],
                cap=config.templates_per_symbol,
            )

    with _stage("evaluate"):
        results = []
        for i in range(x_test.shape[0]):
            if model is not None:
                ranked = predict_topk(model, x_test[i], k=10)
            else:
                ranked = store.classify(pre_splits.test[i], k=10)
            results.append((ranked, int(y_test[i])))
        classes = default_equivalences(symbols)
        report = {
            "top1_error": topn_error(results, 1) if results else float("nan"),
            "top3_error": topn_error(results, 3) if results else float("nan"),
            "mer_error": mer_error(results, classes) if results else float("nan"),
        }

    bundle = ClassifierBundle(
        queue=config.queue,
        feature_specs=config.feature_specs,
        standardization=std,
        model=model,
        store=store,
        symbols=symbols,
    )

    out_path = None
    if out_dir is not None:
        with _stage("persist"):
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            if model is not None:
                with open(out_path / "model.json", "wb") as fh:
                    fh.write(serialize_model(model))
            with open(out_path / "standardization.json", "w") as fh:
                json.dump(std.to_dict(), fh)
            write_training_log(history, out_path / "training_log.csv")
            with open(out_path / "report.csv", "w") as fh:
                fh.write("measure,value\n")
                for measure, value in report.items():
                    fh.write(f"{measure},{100.0 * value:.2f}\n")
            bundle.save(out_path / "bundle.json")

    return ExperimentResult(
        report=report,
        history=history,
        out_dir=out_path,
        model=model,
        store=store,
        bundle=bundle,
    )


# ---------------------------------------------------------------------------
# classifier bundle

_BUNDLE_FORMAT = "symrec-bundle"


class ClassifierBundle:
    """Everything one classification needs, in a single reloadable file."""

    def __init__(self, queue, feature_specs, standardization, model=None,
                 store=None, symbols=None):
        if (model is None) == (store is None):
            raise ConfigError("bundle needs exactly one of model or template store")
        self.queue = queue
        self.feature_specs = feature_specs
        self.standardization = standardization
        self.model = model
        self.store = store
        self.symbols = symbols if symbols is not None else (
            model.symbols if model is not None else None
        )

    @property
    def backend(self) -> str:
        return "mlp" if self.model is not None else "gtw"

    def classify(self, rec: Recording, k: int = 10) -> list[tuple[int, float]]:
        """Ranked (symbol id, probability) for one recording."""
        prepared = self.queue.apply(rec, warn_order=False)
        if self.model is not None:
            vec = compose(prepared, self.feature_specs)
            if self.standardization is not None:
                vec = apply_standardization(self.standardization, vec)
            return predict_topk(self.model, vec, k=k)
        return self.store.classify(prepared, k=k)

    def describe(self) -> dict:
        info: dict = {
            "backend": self.backend,
            "feature_dim": total_dimension(self.feature_specs),
            "feature_hash": spec_list_hash(self.feature_specs),
            "symbol_count": len(self.symbols) if self.symbols is not None else None,
        }
        if self.model is not None:
            info["topology"] = self.model.topology
        else:
            info["templates"] = {
                str(s): len(t) for s, t in sorted(self.store.templates.items())
            }
        return info

    def to_json(self) -> bytes:
        doc = {
            "format": _BUNDLE_FORMAT,
            "version": 1,
            "backend": self.backend,
            "queue": self.queue.to_config(),
            "features": specs_to_config(self.feature_specs),
            "standardization": (
                self.standardization.to_dict() if self.standardization else None
            ),
            "symbols": (
                {str(i): c for i, c in sorted(self.symbols.to_dict().items())}
                if self.symbols is not None
                else None
            ),
        }
        if self.model is not None:
            doc["model"] = json.loads(serialize_model(self.model).decode())
        else:
            doc["templates"] = {
                str(symbol_id): [
                    json.loads(serialize_recording(rec)) for rec in recs
                ]
                for symbol_id, recs in sorted(self.store.templates.items())
            }
        return json.dumps(doc, separators=(",", ":")).encode()

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_json())

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_json()).hexdigest()[:16]


def load_bundle(path) -> ClassifierBundle:
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != _BUNDLE_FORMAT:
        raise ConfigError(f"{path} is not a classifier bundle")
    if doc.get("version") != 1:
        raise ConfigError(f"unsupported bundle version {doc.get('version')!r}")
    queue = queue_from_config(doc.get("queue"))
    specs = specs_from_config(doc.get("features") or [])
    std = (
        Standardization.from_dict(doc["standardization"])
        if doc.get("standardization")
        else None
    )
    symbols = (
        SymbolTable({int(k): v for k, v in doc["symbols"].items()})
        if doc.get("symbols")
        else None
    )
    if doc.get("backend") == "mlp":
        model = deserialize_model(json.dumps(doc["model"]).encode())
        return ClassifierBundle(queue, specs, std, model=model, symbols=symbols)
    templates = {
        int(symbol_id): [
            parse_recording(json.dumps(stroke_list)) for stroke_list in recs
        ]
        for symbol_id, recs in (doc.get("templates") or {}).items()
    }
    store = GtwTemplateStore(templates)
    return ClassifierBundle(queue, specs, std, store=store, symbols=symbols)
