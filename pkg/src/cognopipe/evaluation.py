"""Cross-validated experiments, majority-vote fusion, metrics, reports.

An experiment is one (task, feature set, classifier) cell evaluated over
subject-level folds.  Per-fold artifacts (standardizer, vocabulary,
model) each record the subjects they were fitted on, and every fold is
audited so that no fitted artifact ever saw a test subject.  The four
per-task predictions of a subject fuse by majority vote into the final
screening label.
"""

from __future__ import annotations

import enum
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import numpy as np

from . import acoustic, classifiers, dsp, linguistic
from .corpus import Corpus, Diagnosis, FoldAssignment, Label, Task
from .errors import EvaluationError
from .features import FeatureSetId, FeatureVector

REPORT_SCHEMA_VERSION = "1.0"

DISCLAIMERS = (
    "speech segmentation uses energy-based voice activity detection",
    "snr_db is a speech/non-speech power ratio over detected segments; "
    "not comparable to SNR columns produced by other conventions",
    "the linguistic branch is an n-gram/lexical baseline",
    "acoustic feature sets are re-implemented from frozen manifests, not "
    "openSMILE outputs, and claim no conformance to eGeMAPS or ComParE",
)


class AveragingMode(enum.Enum):
    BINARY = "Binary"  # Case is the positive class
    MACRO = "Macro"
    WEIGHTED = "Weighted"


class TieBreak(enum.Enum):
    SCORE_SUM = "score_sum"
    ALWAYS_CASE = "always_case"
    ALWAYS_CONTROL = "always_control"


@dataclass(frozen=True)
class FoldPrediction:
    """One subject's prediction for one task (or fused when task is None)."""

    subject_id: str
    task: Task | None
    fold: int
    true_label: Label
    predicted_label: Label
    score: float


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 7
    l2_lambda: float = 1.0
    lr_max_iters: int = 500
    lr_tol: float = 1e-6
    svm_epochs: int = 50
    class_weights: tuple[float, float] | None = None  # None = inverse frequency


@dataclass(frozen=True)
class TaskExperimentResult:
    task: Task
    feature_set: FeatureSetId
    classifier: classifiers.ModelKind
    predictions: tuple[FoldPrediction, ...]
    skipped_subjects: tuple[str, ...]  # no usable recording for this task


class FeatureProvider(Protocol):
    """Supplies per-fold train/test design matrices for one task."""

    feature_set_id: FeatureSetId

    def available_subjects(self) -> tuple[str, ...]: ...

    def fold_features(
        self, train_ids: Sequence[str], test_ids: Sequence[str], fold_name: str
    ) -> tuple[np.ndarray, np.ndarray, frozenset[str]]:
        """Returns (X_train, X_test, subjects_used_to_fit)."""
        ...


@dataclass(frozen=True)
class PrecomputedProvider:
    """Fold-independent vectors (acoustic or lexical), one per subject."""

    feature_set_id: FeatureSetId
    vectors: Mapping[str, FeatureVector]

    def available_subjects(self) -> tuple[str, ...]:
        return tuple(sorted(self.vectors))

    def fold_features(self, train_ids, test_ids, fold_name):
        X_train = np.vstack([self.vectors[s].values for s in train_ids])
        X_test = np.vstack([self.vectors[s].values for s in test_ids])
        return X_train, X_test, frozenset(train_ids)


@dataclass(frozen=True)
class TfidfProvider:
    """Fits a vocabulary per fold on training transcripts only."""

    transcripts: Mapping[str, str]
    n_range: tuple[int, int] = (1, 2)
    min_doc_freq: int = 2
    feature_set_id: FeatureSetId = FeatureSetId.NGRAM_TFIDF

    def available_subjects(self) -> tuple[str, ...]:
        return tuple(sorted(self.transcripts))

    def fold_features(self, train_ids, test_ids, fold_name):
        vocab = linguistic.fit_vocabulary(
            [self.transcripts[s] for s in train_ids],
            n_range=self.n_range,
            min_doc_freq=self.min_doc_freq,
            fitted_on=fold_name,
            fitted_subjects=frozenset(train_ids),
        )
        X_train = np.vstack(
            [linguistic.vectorize_tfidf(self.transcripts[s], vocab).values for s in train_ids]
        )
        X_test = np.vstack(
            [
                linguistic.vectorize_tfidf(self.transcripts[s], vocab, subject_id=s).values
                for s in test_ids
            ]
        )
        return X_train, X_test, vocab.fitted_subjects


def _extract_one(args) -> tuple[str, FeatureVector]:
    """Worker: one recording -> one acoustic/lexical feature vector."""
    (subject_id, audio_path, transcript, duration_s, feature_set_value,
     vad_cfg, ac_cfg) = args
    fsid = FeatureSetId(feature_set_value)
    if fsid is FeatureSetId.LEXICAL:
        return subject_id, linguistic.lexical_vector(transcript or "", duration_s)
    audio = dsp.read_wav(audio_path)
    segments = dsp.detect_speech(audio, vad_cfg)
    if fsid is FeatureSetId.EGEMAPS_LIKE_88:
        return subject_id, acoustic.egemaps_like(audio, segments, ac_cfg)
    if fsid is FeatureSetId.COMPARE_LIKE:
        return subject_id, acoustic.compare_like(audio, segments, ac_cfg)
    raise EvaluationError("extract_task_features", f"no extractor for {fsid.value}")


def extract_task_features(
    corpus: Corpus,
    task: Task,
    feature_set: FeatureSetId,
    vad_cfg: dsp.VadConfig | None = None,
    ac_cfg: acoustic.AcousticConfig | None = None,
    workers: int = 1,
) -> dict[str, FeatureVector]:
    """Per-subject vectors for one task, in sorted-subject order.

    Recordings are independent, so extraction fans out over a process
    pool; results are reduced in subject order, making the output
    independent of worker count.
    """
    recs = sorted(
        (r for r in corpus.recordings if r.task is task), key=lambda r: r.subject_id
    )
    jobs = [
        (r.subject_id, r.audio_path, r.transcript, r.duration_s, feature_set.value,
         vad_cfg, ac_cfg)
        for r in recs
    ]
    if workers <= 1 or len(jobs) <= 1:
        results = [_extract_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_extract_one, jobs, chunksize=4))
    return dict(results)


def build_provider(
    corpus: Corpus,
    task: Task,
    feature_set: FeatureSetId,
    vad_cfg: dsp.VadConfig | None = None,
    ac_cfg: acoustic.AcousticConfig | None = None,
    ngram_range: tuple[int, int] = (1, 2),
    min_doc_freq: int = 2,
    workers: int = 1,
    precomputed: Mapping[str, FeatureVector] | None = None,
) -> FeatureProvider:
    """Make the right provider for a feature set (extracting if needed)."""
    if feature_set is FeatureSetId.NGRAM_TFIDF:
        transcripts = {
            r.subject_id: r.transcript
            for r in corpus.recordings
            if r.task is task and r.transcript is not None
        }
        return TfidfProvider(transcripts, ngram_range, min_doc_freq)
    if precomputed is None:
        precomputed = extract_task_features(corpus, task, feature_set, vad_cfg, ac_cfg, workers)
    return PrecomputedProvider(feature_set, precomputed)


def fold_seed(base_seed: int, task: Task, feature_set: FeatureSetId,
              kind: classifiers.ModelKind, fold: int) -> int:
    """Stable per-experiment-per-fold seed from a hash of the identifiers."""
    key = f"{base_seed}:{task.value}:{feature_set.value}:{kind.value}:fold{fold}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")


def run_task_experiment(
    corpus: Corpus,
    task: Task,
    provider: FeatureProvider,
    classifier_kind: classifiers.ModelKind,
    folds: FoldAssignment,
    config: ExperimentConfig = ExperimentConfig(),
) -> TaskExperimentResult:
    """Train and predict every fold of one (task, feature set, classifier).

    Subjects without a usable recording for the task are skipped and
    listed.  A fold whose training partition collapses to a single class
    is a hard error naming the fold.  After each fold, the fitted
    artifacts are audited for train/test disjointness.
    """
    available = set(provider.available_subjects())
    skipped = tuple(sorted(set(folds.fold_of_subject) - available))
    predictions: list[FoldPrediction] = []
    for f in range(folds.k):
        train_ids = tuple(s for s in folds.train_subjects(f) if s in available)
        test_ids = tuple(s for s in folds.test_subjects(f) if s in available)
        if not test_ids:
            continue
        y_train = np.array(
            [
                1.0 if corpus.subject(s).binary_label is Label.CASE else 0.0
                for s in train_ids
            ]
        )
        if y_train.size == 0 or len(set(y_train.tolist())) < 2:
            raise EvaluationError(
                "run_task_experiment",
                f"fold {f} training partition for task {task.value} is single-class",
            )
        fold_name = f"{task.value}/{provider.feature_set_id.value}/fold{f}-train"
        X_train, X_test, fitted_on = provider.fold_features(train_ids, test_ids, fold_name)

        std = classifiers.fit_standardizer(X_train, fitted_subjects=frozenset(train_ids))
        Xs_train = classifiers.apply_standardizer(X_train, std)
        Xs_test = classifiers.apply_standardizer(X_test, std)

        seed = fold_seed(config.seed, task, provider.feature_set_id, classifier_kind, f)
        if classifier_kind is classifiers.ModelKind.LOGISTIC_REGRESSION:
            model = classifiers.train_logistic(
                Xs_train,
                y_train,
                l2_lambda=config.l2_lambda,
                max_iters=config.lr_max_iters,
                tol=config.lr_tol,
                class_weights=config.class_weights,
                fitted_subjects=frozenset(train_ids),
            )
        else:
            model = classifiers.train_linear_svm(
                Xs_train,
                2.0 * y_train - 1.0,
                l2_lambda=config.l2_lambda,
                epochs=config.svm_epochs,
                seed=seed,
                class_weights=config.class_weights,
                fitted_subjects=frozenset(train_ids),
            )

        audit_no_leakage((std.fitted_subjects, model.fitted_subjects, fitted_on), test_ids)

        scores = np.atleast_1d(classifiers.decision_score(Xs_test, model))
        for sid, score in zip(test_ids, scores):
            predicted = Label.CASE if score >= 0 else Label.CONTROL
            predictions.append(
                FoldPrediction(
                    subject_id=sid,
                    task=task,
                    fold=f,
                    true_label=corpus.subject(sid).binary_label,
                    predicted_label=predicted,
                    score=float(score),
                )
            )
    return TaskExperimentResult(
        task=task,
        feature_set=provider.feature_set_id,
        classifier=classifier_kind,
        predictions=tuple(predictions),
        skipped_subjects=skipped,
    )


def audit_no_leakage(
    fitted_subject_sets: Sequence[frozenset[str]], test_ids: Sequence[str]
) -> None:
    """Structural check: no fitted artifact may have seen a test subject."""
    test = set(test_ids)
    for fitted in fitted_subject_sets:
        overlap = fitted & test
        if overlap:
            raise EvaluationError(
                "audit_no_leakage",
                f"fitted artifact saw test subjects {sorted(overlap)}",
            )


def majority_vote(
    task_predictions: Sequence[FoldPrediction],
    tie_break: TieBreak = TieBreak.SCORE_SUM,
) -> FoldPrediction:
    """Fuse one subject's per-task predictions into a final label.

    Majority of labels wins.  On a tie, score_sum takes the sign of the
    summed decision scores (exact zero goes to Case, the
    screening-conservative side); the other modes force a side.
    """
    if not task_predictions:
        raise EvaluationError("majority_vote", "no task predictions for subject")
    sids = {p.subject_id for p in task_predictions}
    if len(sids) != 1:
        raise EvaluationError("majority_vote", f"mixed subjects in vote: {sorted(sids)}")
    n_case = sum(1 for p in task_predictions if p.predicted_label is Label.CASE)
    n_control = len(task_predictions) - n_case
    score_sum = float(sum(p.score for p in task_predictions))
    if n_case > n_control:
        label = Label.CASE
    elif n_control > n_case:
        label = Label.CONTROL
    elif tie_break is TieBreak.ALWAYS_CASE:
        label = Label.CASE
    elif tie_break is TieBreak.ALWAYS_CONTROL:
        label = Label.CONTROL
    else:
        label = Label.CASE if score_sum >= 0 else Label.CONTROL
    first = task_predictions[0]
    return FoldPrediction(
        subject_id=first.subject_id,
        task=None,
        fold=first.fold,
        true_label=first.true_label,
        predicted_label=label,
        score=score_sum,
    )


def fuse_predictions(
    experiments: Sequence[TaskExperimentResult],
    tie_break: TieBreak = TieBreak.SCORE_SUM,
) -> tuple[tuple[FoldPrediction, ...], tuple[str, ...]]:
    """Majority-vote over per-task predictions of each subject.

    Experiments must share feature set and classifier (one fusion cell).
    Returns (fused predictions in subject order, subjects with zero
    predictions across all tasks).
    """
    cells = {(e.feature_set, e.classifier) for e in experiments}
    if len(cells) > 1:
        raise EvaluationError(
            "fuse_predictions", f"cannot fuse across configurations: {sorted(str(c) for c in cells)}"
        )
    by_subject: dict[str, list[FoldPrediction]] = {}
    all_subjects: set[str] = set()
    for e in experiments:
        all_subjects.update(e.skipped_subjects)
        for p in e.predictions:
            by_subject.setdefault(p.subject_id, []).append(p)
            all_subjects.add(p.subject_id)
    fused = tuple(
        majority_vote(by_subject[sid], tie_break) for sid in sorted(by_subject)
    )
    excluded = tuple(sorted(all_subjects - set(by_subject)))
    return fused, excluded


@dataclass(frozen=True)
class ConfusionBreakdown:
    """3x2 diagnosis-level table plus its Case/Control collapse.

    three_by_two rows follow DIAGNOSIS_ROWS, columns are
    (predicted Case, predicted Control); two_by_two rows are
    (true Case, true Control) over the same columns.
    """

    DIAGNOSIS_ROWS = (Diagnosis.DEMENTIA, Diagnosis.MCI, Diagnosis.HC)

    three_by_two: tuple[tuple[int, int], ...]
    two_by_two: tuple[tuple[int, int], ...]

    @property
    def tp(self) -> int:
        return self.two_by_two[0][0]

    @property
    def fn(self) -> int:
        return self.two_by_two[0][1]

    @property
    def fp(self) -> int:
        return self.two_by_two[1][0]

    @property
    def tn(self) -> int:
        return self.two_by_two[1][1]


def confusion(
    fused_predictions: Sequence[FoldPrediction], corpus: Corpus
) -> ConfusionBreakdown:
    """Count fused predictions against the 3-way diagnosis and 2-way label."""
    counts = np.zeros((3, 2), dtype=int)
    row_of = {d: i for i, d in enumerate(ConfusionBreakdown.DIAGNOSIS_ROWS)}
    for p in fused_predictions:
        try:
            subject = corpus.subject(p.subject_id)
        except KeyError:
            raise EvaluationError("confusion", f"unknown subject '{p.subject_id}'")
        col = 0 if p.predicted_label is Label.CASE else 1
        counts[row_of[subject.diagnosis], col] += 1
    collapsed = np.vstack([counts[0] + counts[1], counts[2]])
    return ConfusionBreakdown(
        three_by_two=tuple(tuple(int(v) for v in row) for row in counts),
        two_by_two=tuple(tuple(int(v) for v in row) for row in collapsed),
    )


@dataclass(frozen=True)
class MetricSet:
    precision: float
    recall: float
    f1: float
    precision_std: float
    recall_std: float
    f1_std: float
    sensitivity: float
    specificity: float
    averaging_mode: AveragingMode
    zero_division: bool  # some cell had no predicted/true positives


def _prf_counts(preds: Sequence[FoldPrediction], positive: Label):
    tp = sum(1 for p in preds if p.true_label is positive and p.predicted_label is positive)
    fp = sum(1 for p in preds if p.true_label is not positive and p.predicted_label is positive)
    fn = sum(1 for p in preds if p.true_label is positive and p.predicted_label is not positive)
    support = sum(1 for p in preds if p.true_label is positive)
    return tp, fp, fn, support


def _prf(preds: Sequence[FoldPrediction], mode: AveragingMode):
    """(precision, recall, f1, zero_division_hit) under the averaging mode."""
    per_class = []
    flagged = False
    for positive in (Label.CASE, Label.CONTROL):
        tp, fp, fn, support = _prf_counts(preds, positive)
        if tp + fp == 0 or tp + fn == 0:
            flagged = True
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        per_class.append((prec, rec, f1, support))
    if mode is AveragingMode.BINARY:
        prec, rec, f1, _ = per_class[0]
        return prec, rec, f1, flagged
    if mode is AveragingMode.MACRO:
        return (
            float(np.mean([c[0] for c in per_class])),
            float(np.mean([c[1] for c in per_class])),
            float(np.mean([c[2] for c in per_class])),
            flagged,
        )
    total = sum(c[3] for c in per_class)
    if total == 0:
        return 0.0, 0.0, 0.0, True
    weights = [c[3] / total for c in per_class]
    return (
        float(sum(w * c[0] for w, c in zip(weights, per_class))),
        float(sum(w * c[1] for w, c in zip(weights, per_class))),
        float(sum(w * c[2] for w, c in zip(weights, per_class))),
        flagged,
    )


def metrics(
    cb: ConfusionBreakdown,
    predictions: Sequence[FoldPrediction],
    mode: AveragingMode = AveragingMode.BINARY,
) -> MetricSet:
    """Precision/recall/F1 under the averaging mode, with across-fold stds.

    Sensitivity and specificity always come from the collapsed 2x2 table
    (Case positive).  Stds are the population std of the per-fold metric
    values.  Cells with an empty denominator score 0 and set the
    zero_division flag.
    """
    if not predictions:
        raise EvaluationError("metrics", "no predictions")
    precision, recall, f1, flagged = _prf(predictions, mode)
    per_fold = {}
    for p in predictions:
        per_fold.setdefault(p.fold, []).append(p)
    fold_vals = []
    for f in sorted(per_fold):
        pf, rf, ff, flag_f = _prf(per_fold[f], mode)
        flagged = flagged or flag_f
        fold_vals.append((pf, rf, ff))
    arr = np.array(fold_vals)
    sens = cb.tp / (cb.tp + cb.fn) if cb.tp + cb.fn else 0.0
    spec = cb.tn / (cb.tn + cb.fp) if cb.tn + cb.fp else 0.0
    return MetricSet(
        precision=precision,
        recall=recall,
        f1=f1,
        precision_std=float(np.std(arr[:, 0])),
        recall_std=float(np.std(arr[:, 1])),
        f1_std=float(np.std(arr[:, 2])),
        sensitivity=sens,
        specificity=spec,
        averaging_mode=mode,
        zero_division=flagged,
    )


def _metric_block(cb: ConfusionBreakdown, preds: Sequence[FoldPrediction]) -> dict:
    return {
        mode.value: _metricset_doc(metrics(cb, preds, mode)) for mode in AveragingMode
    }


def _metricset_doc(m: MetricSet) -> dict:
    return {
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
        "precision_std": m.precision_std,
        "recall_std": m.recall_std,
        "f1_std": m.f1_std,
        "sensitivity": m.sensitivity,
        "specificity": m.specificity,
        "zero_division": m.zero_division,
    }


def _prediction_rows(preds: Sequence[FoldPrediction]) -> list[list]:
    return [
        [
            p.subject_id,
            p.task.value if p.task is not None else "fused",
            p.fold,
            p.true_label.value,
            p.predicted_label.value,
            p.score,
        ]
        for p in sorted(preds, key=lambda p: (p.subject_id, p.task.value if p.task else ""))
    ]


_CSV_METRIC_COLS = "precision,recall,f1,precision_std,recall_std,f1_std,sensitivity,specificity"


def _csv_line(parts) -> str:
    return ",".join(str(v) for v in parts)


def build_report(
    corpus: Corpus,
    folds: FoldAssignment,
    experiments: Sequence[TaskExperimentResult],
    config_echo: Mapping,
    tie_break: TieBreak = TieBreak.SCORE_SUM,
) -> dict:
    """Assemble the full evaluation document (JSON-serializable).

    Per-task blocks cover each experiment; fusion blocks cover each
    (feature set, classifier) cell over its available tasks.  CSV blocks
    duplicate the metric tables for spreadsheet use; chart_data carries
    the per-task F1 bars.  The document is deterministic: every list is
    explicitly ordered, so serialization is byte-stable.
    """
    experiments = sorted(
        experiments, key=lambda e: (e.task.value, e.feature_set.value, e.classifier.value)
    )
    per_task_rows = []
    per_task_csv = [f"task,feature_set,classifier,{_CSV_METRIC_COLS}"]
    chart = []
    for e in experiments:
        cb = confusion(e.predictions, corpus)
        block = {
            "task": e.task.value,
            "feature_set": e.feature_set.value,
            "classifier": e.classifier.value,
            "n_predictions": len(e.predictions),
            "skipped_subjects": list(e.skipped_subjects),
            "confusion_3x2": [list(r) for r in cb.three_by_two],
            "confusion_2x2": [list(r) for r in cb.two_by_two],
            "metrics": _metric_block(cb, e.predictions),
            "predictions": _prediction_rows(e.predictions),
        }
        per_task_rows.append(block)
        binary = block["metrics"]["Binary"]
        per_task_csv.append(
            _csv_line(
                [e.task.value, e.feature_set.value, e.classifier.value]
                + [binary[k] for k in _CSV_METRIC_COLS.split(",")]
            )
        )
        chart.append(
            {
                "task": e.task.value,
                "feature_set": e.feature_set.value,
                "classifier": e.classifier.value,
                "f1": binary["f1"],
            }
        )

    cells: dict[tuple[FeatureSetId, classifiers.ModelKind], list[TaskExperimentResult]] = {}
    for e in experiments:
        cells.setdefault((e.feature_set, e.classifier), []).append(e)
    fused_rows = []
    fused_csv = [f"feature_set,classifier,n_tasks,{_CSV_METRIC_COLS}"]
    for (fsid, kind) in sorted(cells, key=lambda c: (c[0].value, c[1].value)):
        cell = cells[(fsid, kind)]
        fused, excluded = fuse_predictions(cell, tie_break)
        cb = confusion(fused, corpus)
        block = {
            "feature_set": fsid.value,
            "classifier": kind.value,
            "n_tasks": len(cell),
            "n_subjects": len(fused),
            "excluded_subjects": list(excluded),
            "confusion_3x2": [list(r) for r in cb.three_by_two],
            "confusion_2x2": [list(r) for r in cb.two_by_two],
            "metrics": _metric_block(cb, fused),
            "predictions": _prediction_rows(fused),
        }
        fused_rows.append(block)
        binary = block["metrics"]["Binary"]
        fused_csv.append(
            _csv_line(
                [fsid.value, kind.value, len(cell)]
                + [binary[k] for k in _CSV_METRIC_COLS.split(",")]
            )
        )

    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "disclaimers": list(DISCLAIMERS),
        "config": dict(config_echo),
        "corpus": {
            "n_subjects": len(corpus.subjects),
            "n_recordings": len(corpus.recordings),
            "diagnosis_counts": {
                d.value: n for d, n in sorted(
                    corpus.diagnosis_counts().items(), key=lambda kv: kv[0].value
                )
            },
            "label_counts": {
                lab.value: n for lab, n in sorted(
                    corpus.label_counts().items(), key=lambda kv: kv[0].value
                )
            },
        },
        "folds": {
            "k": folds.k,
            "sizes": list(folds.fold_sizes()),
            "assignment": dict(sorted(folds.fold_of_subject.items())),
        },
        "per_task": per_task_rows,
        "fused": fused_rows,
        "per_task_csv": "\n".join(per_task_csv) + "\n",
        "fused_csv": "\n".join(fused_csv) + "\n",
        "chart_data": {"per_task_f1": chart},
    }


def write_report(report: Mapping, path) -> None:
    """Serialize with sorted keys so identical runs are byte-identical."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(report, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
