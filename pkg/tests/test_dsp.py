"""WAV I/O, framing, speech detection, and SNR estimation."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cognopipe import dsp
from cognopipe.errors import AudioFormatError

from conftest import SR, tone


# ---------------------------------------------------------------------------
# WAV I/O

def test_wav_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.9, 0.9, 4000)
    p = tmp_path / "a.wav"
    dsp.write_wav(p, x, SR)
    audio = dsp.read_wav(p)
    assert audio.sample_rate_hz == SR
    assert audio.samples.size == 4000
    assert np.max(np.abs(audio.samples - x)) <= 0.5 / 32768 + 1e-12


def test_wav_exact_on_quantized_grid(tmp_path):
    x = np.array([0, 1, -1, 100, -32768, 32767]) / 32768.0
    p = tmp_path / "g.wav"
    dsp.write_wav(p, x, 8000)
    assert np.array_equal(dsp.read_wav(p).samples, x)


def test_wav_write_clips_overdrive(tmp_path):
    p = tmp_path / "c.wav"
    dsp.write_wav(p, np.array([2.0, -2.0]), 8000)
    got = dsp.read_wav(p).samples
    assert got[0] == 32767 / 32768.0
    assert got[1] == -1.0


def test_read_wav_info_matches_read_wav(tmp_path):
    p = tmp_path / "i.wav"
    dsp.write_wav(p, tone(100, 0.5), SR)
    sr, n = dsp.read_wav_info(p)
    audio = dsp.read_wav(p)
    assert sr == audio.sample_rate_hz
    assert n == audio.samples.size


def _wav_bytes(sr=8000, channels=1, bits=16, fmt=1, n=100, chop=0):
    data = b"\x00\x00" * n
    block = channels * bits // 8
    out = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    out += b"fmt " + struct.pack("<IHHIIHH", 16, fmt, channels, sr, sr * block, block, bits)
    out += b"data" + struct.pack("<I", len(data)) + data
    return out[: len(out) - chop] if chop else out


@pytest.mark.parametrize(
    "raw,defect",
    [
        (b"not a wav at all", "RIFF"),
        (_wav_bytes(channels=2), "channel"),
        (_wav_bytes(bits=8), "8-bit"),
        (_wav_bytes(fmt=3), "non-PCM"),
        (_wav_bytes(chop=50), "truncated"),
        (_wav_bytes()[:40], "data"),
    ],
)
def test_read_wav_rejects_malformed(tmp_path, raw, defect):
    p = tmp_path / "bad.wav"
    p.write_bytes(raw)
    with pytest.raises(AudioFormatError) as exc:
        dsp.read_wav(p)
    assert "bad.wav" in str(exc.value)
    assert defect.lower() in str(exc.value).lower()


def test_read_wav_skips_extra_chunks(tmp_path):
    """LIST/INFO chunks between fmt and data must be tolerated."""
    data = struct.pack("<4h", 100, -100, 200, -200)
    body = b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, 8000, 16000, 2, 16)
    body += b"LIST" + struct.pack("<I", 4) + b"INFO"
    body += b"data" + struct.pack("<I", len(data)) + data
    raw = b"RIFF" + struct.pack("<I", 4 + len(body)) + b"WAVE" + body
    p = tmp_path / "x.wav"
    p.write_bytes(raw)
    audio = dsp.read_wav(p)
    assert audio.samples.size == 4
    assert audio.samples[2] == 200 / 32768.0


def test_audio_buffer_validation():
    with pytest.raises(AudioFormatError):
        dsp.AudioBuffer(np.array([]), SR)
    with pytest.raises(AudioFormatError):
        dsp.AudioBuffer(np.array([np.nan]), SR)
    with pytest.raises(AudioFormatError):
        dsp.AudioBuffer(np.zeros(10), 0)


# ---------------------------------------------------------------------------
# framing / FFT wrappers

def test_frame_signal_layout():
    x = np.arange(1000, dtype=float)
    fs = dsp.frame_signal(x, SR, 0.025, 0.010)  # len 400, hop 160
    assert fs.num_frames == 1 + (1000 - 400) // 160
    assert np.array_equal(fs.frames[0], x[:400])
    assert np.array_equal(fs.frames[1], x[160:560])


def test_frame_signal_short_input():
    assert dsp.frame_signal(np.zeros(10), SR).num_frames == 0


def test_next_pow2():
    assert [dsp.next_pow2(n) for n in (1, 2, 3, 400, 512, 513)] == [1, 2, 4, 512, 512, 1024]


def test_fft_real_zero_pads():
    x = np.array([1.0, 2.0, 3.0])
    got = dsp.fft_real(x, 8)
    padded = np.zeros(8)
    padded[:3] = x
    k = np.arange(5)[:, None]
    t = np.arange(8)[None, :]
    want = (np.exp(-2j * np.pi * k * t / 8) * padded).sum(axis=1)
    assert np.max(np.abs(got - want)) < 1e-12
    with pytest.raises(ValueError):
        dsp.fft_real(x, 6)


def test_frame_energies_db():
    frames = np.vstack([np.full(100, 0.1), np.zeros(100)])
    e = dsp.frame_energies_db(frames)
    assert abs(e[0] - (-20.0)) < 1e-6
    assert abs(e[1] - (-120.0)) < 1e-9


# ---------------------------------------------------------------------------
# speech detection

def _tone_silence_tone():
    quiet = np.zeros(SR)
    return np.concatenate([tone(200, 1.0), quiet, tone(200, 1.0)])


def test_detect_speech_tone_silence_tone():
    audio = dsp.AudioBuffer(_tone_silence_tone(), SR)
    segs = dsp.detect_speech(audio)
    assert len(segs.speech) == 2
    (s0, e0), (s1, e1) = segs.speech
    assert s0 == 0.0
    assert abs(e0 - 1.0) < 0.05
    assert abs(s1 - 2.0) < 0.05
    assert e1 == audio.duration_s  # trailing speech runs to the end


def test_detect_speech_constant_tone_is_all_speech():
    audio = dsp.AudioBuffer(tone(150, 2.0), SR)
    segs = dsp.detect_speech(audio)
    assert segs.speech == ((0.0, audio.duration_s),)


def test_detect_speech_silence_is_empty():
    audio = dsp.AudioBuffer(np.zeros(SR), SR)
    assert dsp.detect_speech(audio).speech == ()


def test_detect_speech_low_level_noise_is_empty():
    rng = np.random.default_rng(0)
    audio = dsp.AudioBuffer(1e-5 * rng.standard_normal(SR), SR)
    assert dsp.detect_speech(audio).speech == ()


def test_detect_speech_drops_short_blips():
    x = np.zeros(2 * SR)
    blip = tone(200, 0.05)
    x[SR : SR + blip.size] = blip  # 50 ms < min_segment_s
    segs = dsp.detect_speech(dsp.AudioBuffer(x, SR))
    assert segs.speech == ()


def test_detect_speech_bridges_short_gaps():
    part = tone(200, 0.5)
    gap = np.zeros(int(0.1 * SR))  # 100 ms < bridge_gap_s
    x = np.concatenate([part, gap, part])
    segs = dsp.detect_speech(dsp.AudioBuffer(x, SR))
    assert len(segs.speech) == 1


def test_detect_speech_gain_invariant():
    x = _tone_silence_tone() + 1e-4 * np.random.default_rng(1).standard_normal(3 * SR)
    a = dsp.detect_speech(dsp.AudioBuffer(x, SR))
    b = dsp.detect_speech(dsp.AudioBuffer(0.25 * x, SR))
    assert a.speech == b.speech


def test_segment_set_validation():
    with pytest.raises(ValueError):
        dsp.SegmentSet(((1.0, 0.5),))
    with pytest.raises(ValueError):
        dsp.SegmentSet(((0.0, 1.0), (0.5, 2.0)))
    s = dsp.SegmentSet(((0.0, 1.0), (2.0, 3.0)))
    assert s.total_speech_s == 2.0
    mask = s.sample_mask(4 * SR, SR)
    assert mask[: SR].all() and not mask[SR : 2 * SR].any()


# ---------------------------------------------------------------------------
# SNR

def test_snr_constructed_20db():
    # first half: sine amplitude 0.3; second half: same waveform at 0.03
    # -> power ratio 100 -> exactly 20 dB
    x = np.concatenate([tone(200, 1.0, amp=0.3), tone(200, 1.0, amp=0.03)])
    segs = dsp.SegmentSet(((0.0, 1.0),))
    audio = dsp.AudioBuffer(x, SR)
    assert abs(dsp.estimate_snr(audio, segs) - 20.0) < 1e-9


def test_snr_caps():
    audio = dsp.AudioBuffer(tone(200, 1.0), SR)
    assert dsp.estimate_snr(audio, dsp.SegmentSet(())) == -120.0
    assert dsp.estimate_snr(audio, dsp.SegmentSet(((0.0, 1.0),))) == 120.0
    # speech over digital silence also caps high
    x = np.concatenate([tone(200, 1.0), np.zeros(SR)])
    audio2 = dsp.AudioBuffer(x, SR)
    assert dsp.estimate_snr(audio2, dsp.SegmentSet(((0.0, 1.0),))) == 120.0


def test_snr_through_vad_tail_not_leaked():
    """The last partial frame of a trailing tone counts as speech."""
    audio = dsp.AudioBuffer(_tone_silence_tone(), SR)
    segs = dsp.detect_speech(audio)
    assert dsp.estimate_snr(audio, segs) == 120.0


def test_snr_gain_invariant():
    x = np.concatenate([tone(200, 1.0, amp=0.3), tone(200, 1.0, amp=0.01)])
    segs = dsp.SegmentSet(((0.0, 1.0),))
    a = dsp.estimate_snr(dsp.AudioBuffer(x, SR), segs)
    b = dsp.estimate_snr(dsp.AudioBuffer(0.25 * x, SR), segs)
    assert abs(a - b) < 1e-9


# ---------------------------------------------------------------------------
# properties

@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=2000), st.integers(min_value=0, max_value=2**32 - 1))
def test_wav_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 32767 / 32768.0, n)
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        p = Path(d) / "p.wav"
        dsp.write_wav(p, x, SR)
        got = dsp.read_wav(p).samples
    assert got.size == n
    assert np.max(np.abs(got - x)) <= 0.5 / 32768 + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_detect_speech_output_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(100, 3 * SR))
    x = np.zeros(n)
    # random bursts of tone
    for _ in range(int(rng.integers(0, 4))):
        a = int(rng.integers(0, n))
        b = min(n, a + int(rng.integers(1, SR)))
        t = np.arange(b - a) / SR
        x[a:b] += 0.3 * np.sin(2 * np.pi * 180 * t)
    audio = dsp.AudioBuffer(x + 1e-6, SR)
    segs = dsp.detect_speech(audio)
    prev_end = -1.0
    for s, e in segs.speech:
        assert 0.0 <= s < e <= audio.duration_s + 1e-9
        assert s >= prev_end
        assert e - s >= dsp.VadConfig().min_segment_s - 1e-9
        prev_end = e
    assert -120.0 <= dsp.estimate_snr(audio, segs) <= 120.0
