"""Run configuration: defaults <- config file <- command-line flags.

The merged, effective configuration is echoed into every report for
provenance, with one deliberate exception: the worker count is an
execution detail that must not change results, so it is excluded from
the echo (reports stay byte-identical across --workers values).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from .acoustic import AcousticConfig
from .classifiers import ModelKind
from .corpus import Task
from .dsp import VadConfig
from .errors import ConfigError
from .evaluation import AveragingMode, TieBreak
from .features import FeatureSetId


@dataclass(frozen=True)
class NgramConfig:
    n_lo: int = 1
    n_hi: int = 2
    min_doc_freq: int = 2


@dataclass(frozen=True)
class ClassifierConfig:
    l2_lambda: float = 1.0
    lr_max_iters: int = 500
    lr_tol: float = 1e-6
    svm_epochs: int = 50


DEFAULT_TASKS = tuple(Task)
DEFAULT_FEATURE_SETS = (FeatureSetId.EGEMAPS_LIKE_88, FeatureSetId.NGRAM_TFIDF)
DEFAULT_CLASSIFIERS = (ModelKind.LOGISTIC_REGRESSION, ModelKind.LINEAR_SVM)


@dataclass(frozen=True)
class RunConfig:
    manifest: str | None = None
    out_dir: str = "out"
    tasks: tuple[Task, ...] = DEFAULT_TASKS
    feature_sets: tuple[FeatureSetId, ...] = DEFAULT_FEATURE_SETS
    classifiers: tuple[ModelKind, ...] = DEFAULT_CLASSIFIERS
    k: int = 5
    seed: int = 7
    tie_break: TieBreak = TieBreak.SCORE_SUM
    averaging: AveragingMode = AveragingMode.BINARY
    workers: int | None = None  # None = available parallelism
    vad: VadConfig = field(default_factory=VadConfig)
    acoustic: AcousticConfig = field(default_factory=AcousticConfig)
    ngram: NgramConfig = field(default_factory=NgramConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("run_config", f"k must be >= 2, got {self.k}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("run_config", f"workers must be >= 1, got {self.workers}")
        if not self.tasks:
            raise ConfigError("run_config", "no tasks selected")
        if not self.feature_sets:
            raise ConfigError("run_config", "no feature sets selected")
        if not self.classifiers:
            raise ConfigError("run_config", "no classifiers selected")


def _parse_enum_list(raw, enum_cls, what: str) -> tuple:
    out = []
    values = [e.value for e in enum_cls]
    items = raw.split(",") if isinstance(raw, str) else list(raw)
    for item in items:
        item = item.strip()
        try:
            out.append(enum_cls(item))
        except ValueError:
            raise ConfigError(
                "parse", f"unknown {what} '{item}'; valid: {', '.join(values)}"
            )
    if len(set(out)) != len(out):
        raise ConfigError("parse", f"duplicate {what} in {items}")
    return tuple(out)


def _build_nested(cls, doc: dict, where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError("parse", f"unknown {where} keys: {sorted(unknown)}")
    try:
        return cls(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError("parse", f"bad {where} section: {exc}")


def load_config_file(path) -> dict:
    """Parse the JSON config document into RunConfig keyword arguments."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("load", f"cannot read config {path}: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("load", f"config root must be an object, got {type(doc).__name__}")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError("load", f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in doc.items():
        if key == "tasks":
            kwargs[key] = _parse_enum_list(value, Task, "task")
        elif key == "feature_sets":
            kwargs[key] = _parse_enum_list(value, FeatureSetId, "feature set")
        elif key == "classifiers":
            kwargs[key] = _parse_enum_list(value, ModelKind, "classifier")
        elif key == "tie_break":
            kwargs[key] = _parse_enum_list(value, TieBreak, "tie_break")[0]
        elif key == "averaging":
            kwargs[key] = _parse_enum_list(value, AveragingMode, "averaging mode")[0]
        elif key == "vad":
            kwargs[key] = _build_nested(VadConfig, value, "vad")
        elif key == "acoustic":
            kwargs[key] = _build_nested(AcousticConfig, value, "acoustic")
        elif key == "ngram":
            kwargs[key] = _build_nested(NgramConfig, value, "ngram")
        elif key == "classifier":
            kwargs[key] = _build_nested(ClassifierConfig, value, "classifier")
        else:
            kwargs[key] = value
    return kwargs


def merge_config(file_path=None, **flag_overrides) -> RunConfig:
    """Defaults, then config file values, then non-None flag values."""
    kwargs = load_config_file(file_path) if file_path else {}
    for key, value in flag_overrides.items():
        if value is None:
            continue
        if key == "tasks":
            value = _parse_enum_list(value, Task, "task")
        elif key == "feature_sets":
            value = _parse_enum_list(value, FeatureSetId, "feature set")
        elif key == "classifiers":
            value = _parse_enum_list(value, ModelKind, "classifier")
        elif key == "tie_break" and isinstance(value, str):
            value = _parse_enum_list(value, TieBreak, "tie_break")[0]
        elif key == "averaging" and isinstance(value, str):
            value = _parse_enum_list(value, AveragingMode, "averaging mode")[0]
        kwargs[key] = value
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError("merge", str(exc))


def _dataclass_doc(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


def config_echo(cfg: RunConfig) -> dict:
    """JSON-able view of the effective config, minus execution details."""
    return {
        "manifest": cfg.manifest,
        "out_dir": cfg.out_dir,
        "tasks": [t.value for t in cfg.tasks],
        "feature_sets": [f.value for f in cfg.feature_sets],
        "classifiers": [c.value for c in cfg.classifiers],
        "k": cfg.k,
        "seed": cfg.seed,
        "tie_break": cfg.tie_break.value,
        "averaging": cfg.averaging.value,
        "vad": _dataclass_doc(cfg.vad),
        "acoustic": _dataclass_doc(cfg.acoustic),
        "ngram": _dataclass_doc(cfg.ngram),
        "classifier": _dataclass_doc(cfg.classifier),
    }
