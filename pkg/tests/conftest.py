"""Shared fixtures: deterministic signals and small synthetic corpora."""

import numpy as np
import pytest

from cognopipe import corpus, synth
from cognopipe.corpus import (
    Corpus,
    Diagnosis,
    Gender,
    SubjectRecord,
    Task,
    TaskRecording,
)

SR = 16000


def tone(freq_hz: float, dur_s: float, sr: int = SR, amp: float = 0.3) -> np.ndarray:
    t = np.arange(int(dur_s * sr)) / sr
    return amp * np.sin(2 * np.pi * freq_hz * t)


def sawtooth(freq_hz: float, dur_s: float, sr: int = SR, amp: float = 0.3) -> np.ndarray:
    t = np.arange(int(dur_s * sr)) / sr
    phase = np.mod(t * freq_hz, 1.0)
    return amp * (2.0 * phase - 1.0)


def memory_corpus(n_case: int, n_control: int, n_dementia: int = 0) -> Corpus:
    """In-memory corpus with stub recordings (no files on disk).

    Useful wherever only the roster matters (folds, confusion tables,
    providers fed with precomputed vectors).
    """
    subjects = []
    recordings = []
    for i in range(n_case + n_control):
        if i < n_dementia:
            diag = Diagnosis.DEMENTIA
        elif i < n_case:
            diag = Diagnosis.MCI
        else:
            diag = Diagnosis.HC
        sid = f"P{i:03d}"
        subjects.append(SubjectRecord(sid, 70, Gender.UNDISCLOSED, None, diag))
        for task in Task:
            recordings.append(
                TaskRecording(sid, task, f"{sid}.wav", None, None, 1.0, SR)
            )
    return Corpus(tuple(subjects), tuple(recordings))


@pytest.fixture(scope="session")
def small_manifest(tmp_path_factory):
    """Separable 10-subject corpus on disk (5 Case / 5 Control)."""
    root = tmp_path_factory.mktemp("smallcorpus")
    spec = synth.SynthSpec(
        n_case=5,
        n_control=5,
        seed=13,
        acoustic_separation=60.0,
        linguistic_separation=4.0,
        duration_s=3.0,
    )
    return synth.generate(spec, root / "m")


@pytest.fixture(scope="session")
def small_corpus(small_manifest):
    return corpus.load_manifest(small_manifest)
