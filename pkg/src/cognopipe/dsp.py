"""Audio primitives: WAV I/O, framing, FFT, energy VAD, SNR estimation."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .errors import AudioFormatError

SNR_CAP_DB = 120.0
_LOG_FLOOR = 1e-12  # mean-square floor, i.e. -120 dB


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio with samples normalized to [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        if self.samples.size == 0:
            raise AudioFormatError("audio_buffer", "audio buffer is empty")
        if not np.all(np.isfinite(self.samples)):
            raise AudioFormatError("audio_buffer", "audio buffer contains non-finite samples")
        if self.sample_rate_hz <= 0:
            raise AudioFormatError("audio_buffer", f"invalid sample rate {self.sample_rate_hz}")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


@dataclass(frozen=True)
class FrameSequence:
    """Frames laid out as a (num_frames, frame_len) matrix."""

    frames: np.ndarray
    frame_len_s: float
    hop_s: float

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class SegmentSet:
    """Sorted, non-overlapping speech intervals in seconds."""

    speech: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev_end = 0.0
        for start, end in self.speech:
            if start < prev_end - 1e-12 or end <= start:
                raise ValueError(f"segments not sorted/disjoint: {self.speech}")
            prev_end = end

    @property
    def total_speech_s(self) -> float:
        return sum(e - s for s, e in self.speech)

    def sample_mask(self, n_samples: int, sample_rate_hz: int) -> np.ndarray:
        mask = np.zeros(n_samples, dtype=bool)
        for start, end in self.speech:
            a = max(0, int(round(start * sample_rate_hz)))
            b = min(n_samples, int(round(end * sample_rate_hz)))
            mask[a:b] = True
        return mask


@dataclass(frozen=True)
class VadConfig:
    """Energy VAD parameters; see detect_speech."""

    frame_len_s: float = 0.025
    hop_s: float = 0.010
    noise_floor_percentile: float = 10.0
    threshold_margin_db: float = 10.0
    bridge_gap_s: float = 0.2
    min_segment_s: float = 0.1
    # Degenerate-input guard: when the frame-energy dynamic range is below
    # homogeneous_range_db the file has no usable noise floor, so the whole
    # file is labeled speech iff its median energy clears the absolute floor.
    homogeneous_range_db: float = 10.0
    homogeneous_speech_floor_db: float = -60.0


# ---------------------------------------------------------------------------
# WAV I/O (RIFF/WAVE, PCM 16-bit, mono)

def _parse_wav_header(raw: bytes, path: Path) -> tuple[int, int, int]:
    """Return (sample_rate, data_offset, data_len_bytes) or raise."""

    def bad(defect: str):
        return AudioFormatError("read_wav", f"{path}: {defect}")

    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise bad("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        (chunk_len,) = struct.unpack_from("<I", raw, pos + 4)
        body = pos + 8
        if chunk_id == b"fmt ":
            if chunk_len < 16 or body + 16 > len(raw):
                raise bad("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", raw, body)
        elif chunk_id == b"data":
            data = (body, chunk_len)
        pos = body + chunk_len + (chunk_len & 1)
    if fmt is None:
        raise bad("missing fmt chunk")
    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if audio_format != 1:
        raise bad(f"non-PCM format tag {audio_format}")
    if channels != 1:
        raise bad(f"multi-channel audio ({channels} channels)")
    if bits != 16:
        raise bad(f"{bits}-bit samples, expected 16-bit PCM")
    if data is None:
        raise bad("missing data chunk")
    offset, length = data
    if offset + length > len(raw):
        raise bad(f"truncated data chunk (declares {length} bytes, "
                  f"{len(raw) - offset} available)")
    if length % 2:
        raise bad("data chunk length is not a whole number of 16-bit samples")
    return sample_rate, offset, length


def read_wav_info(path: str | Path) -> tuple[int, int]:
    """Validate headers and return (sample_rate_hz, n_samples) without decoding."""
    path = Path(path)
    raw = path.read_bytes()
    sample_rate, _offset, length = _parse_wav_header(raw, path)
    return sample_rate, length // 2


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a PCM-16 mono WAV file; samples are scaled by 1/32768."""
    path = Path(path)
    raw = path.read_bytes()
    sample_rate, offset, length = _parse_wav_header(raw, path)
    if length == 0:
        raise AudioFormatError("read_wav", f"{path}: empty data chunk")
    pcm = np.frombuffer(raw, dtype="<i2", count=length // 2, offset=offset)
    return AudioBuffer(pcm.astype(np.float64) / 32768.0, sample_rate)


def write_wav(path: str | Path, samples: np.ndarray, sample_rate_hz: int) -> None:
    """Write samples in [-1, 1] as PCM-16 mono (round, clip at full scale)."""
    pcm = np.clip(np.round(np.asarray(samples, dtype=np.float64) * 32768.0),
                  -32768, 32767).astype("<i2")
    data = pcm.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, sample_rate_hz,
                                    sample_rate_hz * 2, 2, 16)
    header += b"data" + struct.pack("<I", len(data))
    Path(path).write_bytes(header + data)


# ---------------------------------------------------------------------------
# Framing and FFT

def frame_signal(samples: np.ndarray, sample_rate_hz: int,
                 frame_len_s: float = 0.025, hop_s: float = 0.010) -> FrameSequence:
    """Slice a signal into overlapping frames (num = 1 + floor((N-len)/hop))."""
    flen = int(round(frame_len_s * sample_rate_hz))
    hop = int(round(hop_s * sample_rate_hz))
    n = samples.size
    if n < flen:
        return FrameSequence(np.empty((0, flen)), frame_len_s, hop_s)
    num = 1 + (n - flen) // hop
    idx = np.arange(flen)[None, :] + hop * np.arange(num)[:, None]
    return FrameSequence(samples[idx], frame_len_s, hop_s)


def next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def fft_real(x: np.ndarray, n: int) -> np.ndarray:
    """Forward DFT of a real vector zero-padded/truncated to length n.

    n must be a power of two >= 2; returns the n//2 + 1 low-frequency bins
    where bin b = sum_t x[t] * exp(-2*pi*i*b*t/n).
    """
    if n < 2 or n & (n - 1):
        raise ValueError(f"fft_real length must be a power of two >= 2, got {n}")
    x = np.asarray(x, dtype=np.float64)
    buf = np.zeros(n)
    m = min(n, x.size)
    buf[:m] = x[:m]
    return kernels.rfft_pow2_batch(buf[None, :])[0]


# ---------------------------------------------------------------------------
# Speech detection and SNR

def frame_energies_db(frames: np.ndarray) -> np.ndarray:
    """Per-frame RMS energy in dB, floored at -120 dB."""
    if frames.shape[0] == 0:
        return np.empty(0)
    return 10.0 * np.log10(np.mean(frames * frames, axis=1) + _LOG_FLOOR)


def detect_speech(audio: AudioBuffer, config: VadConfig | None = None) -> SegmentSet:
    """Energy-based speech/non-speech segmentation.

    A frame is speech when its energy exceeds the noise floor (the
    noise_floor_percentile of frame energies) by threshold_margin_db.
    Adjacent speech frames are merged, gaps shorter than bridge_gap_s are
    bridged, and segments shorter than min_segment_s are dropped.  Files
    with no energy dynamic range fall back to an absolute-floor decision
    (see VadConfig).
    """
    cfg = config or VadConfig()
    fs = frame_signal(audio.samples, audio.sample_rate_hz, cfg.frame_len_s, cfg.hop_s)
    if fs.num_frames == 0:
        return SegmentSet(())
    energies = frame_energies_db(fs.frames)
    lo = np.percentile(energies, cfg.noise_floor_percentile)
    hi = np.percentile(energies, 90.0)
    if hi - lo < cfg.homogeneous_range_db:
        if np.median(energies) > cfg.homogeneous_speech_floor_db:
            mask = np.ones(energies.size, dtype=bool)
        else:
            mask = np.zeros(energies.size, dtype=bool)
    else:
        mask = energies > lo + cfg.threshold_margin_db
    if not mask.any():
        return SegmentSet(())

    # frame runs -> raw intervals
    intervals: list[list[float]] = []
    in_run = False
    start = 0
    for i, flag in enumerate(mask):
        if flag and not in_run:
            start = i
            in_run = True
        elif not flag and in_run:
            intervals.append([start * cfg.hop_s, (i - 1) * cfg.hop_s + cfg.frame_len_s])
            in_run = False
    if in_run:
        intervals.append([start * cfg.hop_s, (mask.size - 1) * cfg.hop_s + cfg.frame_len_s])
    dur = audio.duration_s
    if mask[-1]:
        # the tail beyond the last full frame cannot be classified; it
        # inherits the final frame's label
        intervals[-1][1] = dur

    merged: list[list[float]] = []
    for seg in intervals:
        if merged and seg[0] - merged[-1][1] < cfg.bridge_gap_s:
            merged[-1][1] = max(merged[-1][1], seg[1])
        else:
            merged.append(seg)
    dur = audio.duration_s
    kept = tuple((s, min(e, dur)) for s, e in merged if min(e, dur) - s >= cfg.min_segment_s)
    return SegmentSet(kept)


def estimate_snr(audio: AudioBuffer, segments: SegmentSet) -> float:
    """10*log10 of speech power over non-speech power, capped at +/-120 dB.

    Powers are mean squared amplitudes over the samples inside vs outside
    the speech segments.  No speech -> -120; no (or silent) non-speech
    -> +120.
    """
    mask = segments.sample_mask(audio.samples.size, audio.sample_rate_hz)
    speech = audio.samples[mask]
    noise = audio.samples[~mask]
    if speech.size == 0:
        return -SNR_CAP_DB
    p_speech = float(np.mean(speech * speech))
    if p_speech <= 0.0:
        return -SNR_CAP_DB
    if noise.size == 0:
        return SNR_CAP_DB
    p_noise = float(np.mean(noise * noise))
    if p_noise <= 0.0:
        return SNR_CAP_DB
    return float(np.clip(10.0 * np.log10(p_speech / p_noise), -SNR_CAP_DB, SNR_CAP_DB))
