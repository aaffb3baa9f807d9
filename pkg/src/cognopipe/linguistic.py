"""Transcript features: word n-gram TF-IDF vectors and lexical statistics.

The TF-IDF branch follows the common smoothed convention
(idf = ln((1+N)/(1+df)) + 1, raw term counts, L2 normalization) so its
outputs are comparable with standard text tooling.  Every fitted
vocabulary remembers which subjects produced its training documents;
vectorizing a document from one of those subjects is a hard error, which
turns train/test leakage into a structural impossibility.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import LeakageError, TextError
from .features import FeatureSetId, FeatureVector

VOCAB_FORMAT_VERSION = "1.0"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop empties."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n_range: tuple[int, int]) -> list[str]:
    lo, hi = n_range
    out = []
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i : i + n]))
    return out


@dataclass(frozen=True)
class Vocabulary:
    """n-gram index with idf weights, tied to the partition it was fit on."""

    index: Mapping[str, int]
    idf: np.ndarray
    n_range: tuple[int, int]
    min_doc_freq: int
    fitted_on: str
    fitted_subjects: frozenset[str]

    def __post_init__(self):
        if len(self.index) != self.idf.size:
            raise TextError("vocabulary", "index/idf size mismatch")

    @property
    def size(self) -> int:
        return len(self.index)


def fit_vocabulary(
    train_transcripts: Sequence[str],
    n_range: tuple[int, int] = (1, 2),
    min_doc_freq: int = 2,
    fitted_on: str = "",
    fitted_subjects: frozenset[str] = frozenset(),
) -> Vocabulary:
    """Build an n-gram vocabulary from training transcripts only.

    Kept n-grams appear in at least min_doc_freq documents; indices
    follow lexicographic n-gram order, so fitting is deterministic.
    """
    if not train_transcripts:
        raise TextError("fit_vocabulary", "empty training transcript list")
    lo, hi = n_range
    if lo < 1 or hi < lo:
        raise TextError("fit_vocabulary", f"bad n_range {n_range}")
    df: dict[str, int] = {}
    for doc in train_transcripts:
        for gram in set(_ngrams(tokenize(doc), n_range)):
            df[gram] = df.get(gram, 0) + 1
    kept = sorted(g for g, c in df.items() if c >= min_doc_freq)
    n_docs = len(train_transcripts)
    idf = np.array([np.log((1 + n_docs) / (1 + df[g])) + 1.0 for g in kept])
    return Vocabulary(
        index={g: i for i, g in enumerate(kept)},
        idf=idf,
        n_range=(lo, hi),
        min_doc_freq=min_doc_freq,
        fitted_on=fitted_on,
        fitted_subjects=fitted_subjects,
    )


def vectorize_tfidf(
    text: str, vocab: Vocabulary, subject_id: str | None = None
) -> FeatureVector:
    """tf·idf vector over the vocabulary, L2-normalized unless all-zero.

    Passing the document's subject_id arms the leakage guard: a
    vocabulary fitted on a partition containing that subject refuses to
    vectorize.
    """
    if subject_id is not None and subject_id in vocab.fitted_subjects:
        raise LeakageError(
            "vectorize_tfidf",
            f"subject '{subject_id}' is in the vocabulary's training partition "
            f"('{vocab.fitted_on}')",
        )
    vals = np.zeros(vocab.size)
    for gram in _ngrams(tokenize(text), vocab.n_range):
        idx = vocab.index.get(gram)
        if idx is not None:
            vals[idx] += 1.0
    vals *= vocab.idf
    norm = np.linalg.norm(vals)
    if norm > 0:
        vals /= norm
    return FeatureVector(FeatureSetId.NGRAM_TFIDF, vals)


@dataclass(frozen=True)
class LexicalStats:
    word_count: int
    type_token_ratio: float
    mean_word_length_chars: float
    words_per_second: float | None
    filler_rate: float  # fillers per 100 words


def load_fillers(path=None) -> tuple[str, ...]:
    """Filler lexicon, one entry per line (entries may be bigrams)."""
    if path is None:
        text = resources.files("cognopipe.data").joinpath("fillers.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return tuple(line.strip().lower() for line in text.splitlines() if line.strip())


def _count_fillers(tokens: Sequence[str], fillers: Sequence[str]) -> int:
    singles = {f for f in fillers if " " not in f}
    pairs = {tuple(f.split()) for f in fillers if " " in f}
    count = sum(1 for tok in tokens if tok in singles)
    count += sum(1 for i in range(len(tokens) - 1) if (tokens[i], tokens[i + 1]) in pairs)
    return count


def lexical_stats(
    text: str,
    duration_s: float | None = None,
    fillers: Sequence[str] | None = None,
) -> LexicalStats:
    """Interpretable transcript statistics.

    words_per_second needs a positive duration and is None otherwise;
    the empty transcript yields all-zero statistics by convention.
    """
    tokens = tokenize(text)
    n = len(tokens)
    if fillers is None:
        fillers = load_fillers()
    if n == 0:
        return LexicalStats(0, 0.0, 0.0, None if not duration_s else 0.0, 0.0)
    wps = None
    if duration_s is not None and duration_s > 0:
        wps = n / duration_s
    return LexicalStats(
        word_count=n,
        type_token_ratio=len(set(tokens)) / n,
        mean_word_length_chars=float(np.mean([len(t) for t in tokens])),
        words_per_second=wps,
        filler_rate=100.0 * _count_fillers(tokens, fillers) / n,
    )


def lexical_vector(
    text: str,
    duration_s: float | None = None,
    fillers: Sequence[str] | None = None,
) -> FeatureVector:
    """LexicalStats flattened to a 5-vector (absent words_per_second -> 0)."""
    s = lexical_stats(text, duration_s, fillers)
    return FeatureVector(
        FeatureSetId.LEXICAL,
        np.array(
            [
                float(s.word_count),
                s.type_token_ratio,
                s.mean_word_length_chars,
                s.words_per_second or 0.0,
                s.filler_rate,
            ]
        ),
    )


def write_vocabulary(vocab: Vocabulary, path) -> None:
    """Persist as a versioned CSV: metadata lines, then ngram,index,idf rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["version", VOCAB_FORMAT_VERSION])
        w.writerow(["n_range", vocab.n_range[0], vocab.n_range[1]])
        w.writerow(["min_doc_freq", vocab.min_doc_freq])
        w.writerow(["fitted_on", vocab.fitted_on])
        w.writerow(["fitted_subjects"] + sorted(vocab.fitted_subjects))
        w.writerow(["ngram", "index", "idf"])
        order = sorted(vocab.index.items(), key=lambda kv: kv[1])
        for gram, idx in order:
            w.writerow([gram, idx, repr(float(vocab.idf[idx]))])


def read_vocabulary(path) -> Vocabulary:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        r = csv.reader(fh)
        try:
            version = next(r)[1]
            if version != VOCAB_FORMAT_VERSION:
                raise TextError("read_vocabulary", f"unsupported version '{version}'")
            nr_row = next(r)
            n_range = (int(nr_row[1]), int(nr_row[2]))
            min_doc_freq = int(next(r)[1])
            fitted_row = next(r)
            fitted_on = fitted_row[1] if len(fitted_row) > 1 else ""
            fitted_subjects = frozenset(next(r)[1:])
            next(r)  # column header
            index: dict[str, int] = {}
            idf_of: dict[int, float] = {}
            for row in r:
                index[row[0]] = int(row[1])
                idf_of[int(row[1])] = float(row[2])
        except (StopIteration, IndexError, ValueError) as exc:
            raise TextError("read_vocabulary", f"malformed vocabulary file {path}: {exc}")
    idf = np.array([idf_of[i] for i in range(len(index))])
    return Vocabulary(
        index=index,
        idf=idf,
        n_range=n_range,
        min_doc_freq=min_doc_freq,
        fitted_on=fitted_on,
        fitted_subjects=fitted_subjects,
    )
