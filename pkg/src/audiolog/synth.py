"""Synthetic voices, moods and acoustic backgrounds with known ground truth.

These generators stand in for field recordings in tests and demos. A voice is
a band-limited glottal-like pulse train at a time-varying fundamental passed
through a cascade of formant resonators; moods differ in pitch contour,
rhythm, breathiness and envelope; backgrounds differ in spectral colour,
level and tonality.
"""

from __future__ import annotations

import numpy as np
from scipy.signal import lfilter

from .audio_io import CANONICAL_RATE, AudioClip

MOODS = ("laugh", "sing", "cry", "arguing", "sigh")
ENVIRONMENTS = ("indoor", "outdoor", "tv_music")


def resonator(x: np.ndarray, freq: float, bandwidth: float, fs: int = CANONICAL_RATE) -> np.ndarray:
    r = np.exp(-np.pi * bandwidth / fs)
    theta = 2 * np.pi * freq / fs
    a = [1.0, -2.0 * r * np.cos(theta), r * r]
    return lfilter([1.0 - r], a, x)


def pulse_train(f0: np.ndarray, fs: int = CANONICAL_RATE) -> np.ndarray:
    """Band-limited sawtooth following the instantaneous frequency track ``f0`` (Hz per sample).

    Harmonics are summed only while they sit below Nyquist, so the waveform
    does not alias and its period really is ``1/f0``.
    """
    f0 = np.asarray(f0, dtype=np.float64)
    phase = 2.0 * np.pi * np.cumsum(f0) / fs
    out = np.zeros(f0.size)
    for k in range(1, int(0.5 * fs / max(f0.min(), 1.0)) + 1):
        out += np.where(k * f0 < 0.5 * fs, np.sin(k * phase) / k, 0.0)
    return -2.0 / np.pi * out


def voice(f0: np.ndarray, formants, fs: int = CANONICAL_RATE) -> np.ndarray:
    y = pulse_train(f0, fs)
    for freq, bw in formants:
        y = resonator(y, freq, bw, fs) * 4.0
    y = y - y.mean()
    peak = np.max(np.abs(y))
    return y / peak if peak > 0 else y


def tone(freq: float, seconds: float, amplitude: float = 1.0, fs: int = CANONICAL_RATE) -> np.ndarray:
    t = np.arange(int(round(seconds * fs))) / fs
    return amplitude * np.sin(2 * np.pi * freq * t)


def sawtooth(freq: float, seconds: float, amplitude: float = 1.0, fs: int = CANONICAL_RATE) -> np.ndarray:
    n = int(round(seconds * fs))
    return amplitude * pulse_train(np.full(n, float(freq)), fs)


# -- conversation -------------------------------------------------------------

SPEAKER_A = dict(f0=120.0, formants=((500.0, 80.0), (1500.0, 120.0), (2500.0, 160.0)))
SPEAKER_B = dict(f0=220.0, formants=((850.0, 90.0), (2200.0, 140.0), (3300.0, 200.0)))


def speaker_signal(n: int, spec: dict, rng: np.random.Generator, fs: int = CANONICAL_RATE) -> np.ndarray:
    t = np.arange(n) / fs
    vibrato = 1.0 + 0.02 * np.sin(2 * np.pi * rng.uniform(3.0, 5.0) * t + rng.uniform(0, 2 * np.pi))
    return voice(spec["f0"] * vibrato, spec["formants"], fs)


def two_speaker_clip(
    seconds: float = 20.0,
    block_s: float = 2.0,
    seed: int = 0,
    swap: bool = False,
    noise_level: float = 0.01,
    fs: int = CANONICAL_RATE,
) -> tuple[AudioClip, np.ndarray]:
    """Alternating blocks of two synthetic speakers and the per-sample speaker (0/1)."""
    rng = np.random.default_rng(seed)
    n = int(round(seconds * fs))
    block = int(round(block_s * fs))
    a = speaker_signal(n, SPEAKER_A, rng, fs)
    b = speaker_signal(n, SPEAKER_B, rng, fs)
    truth = (np.arange(n) // block) % 2
    if swap:
        truth = 1 - truth
    x = np.where(truth == 0, a, b) * 0.6 + rng.normal(0.0, noise_level, n)
    return AudioClip(np.clip(x, -1, 1), fs, "two_speakers"), truth


def frame_truth(sample_truth: np.ndarray, hop: int = 110, frame_len: int = 441) -> np.ndarray:
    """Majority sample label inside each analysis frame."""
    n = sample_truth.size
    n_frames = (n - frame_len) // hop + 1
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n_frames)[:, None]
    return (sample_truth[idx].mean(axis=1) > 0.5).astype(int)


# -- moods --------------------------------------------------------------------

def _jitter_track(base: np.ndarray, amount: float, rng, fs: int) -> np.ndarray:
    """Multiply by a piecewise-constant random factor changing every ~5 ms."""
    step = max(int(0.005 * fs), 1)
    k = base.size // step + 1
    factors = np.repeat(1.0 + amount * rng.standard_normal(k), step)[: base.size]
    return base * factors


def _gate(t: np.ndarray, rate: float, duty: float, phase: float) -> np.ndarray:
    raw = ((t * rate + phase) % 1.0) < duty
    kernel = np.hanning(int(0.02 * CANONICAL_RATE) + 1)
    return np.convolve(raw.astype(float), kernel / kernel.sum(), mode="same")


def mood_voice(mood: str, seconds: float, rng: np.random.Generator, fs: int = CANONICAL_RATE) -> np.ndarray:
    """A voiced signature for one of the five mood classes, peak-normalised."""
    n = int(round(seconds * fs))
    t = np.arange(n) / fs
    u = lambda lo, hi: rng.uniform(lo, hi)  # noqa: E731
    if mood == "laugh":
        f0 = u(270, 310) * (1.0 + 0.08 * np.sin(2 * np.pi * u(4.5, 5.5) * t))
        y = voice(f0, ((u(750, 850), 100), (u(1150, 1300), 130), (2700, 200)), fs)
        y = 0.7 * y + 0.3 * rng.standard_normal(n) * np.std(y)
        y *= _gate(t, u(4.5, 5.5), 0.5, u(0, 1))
    elif mood == "sing":
        f0 = u(240, 270) * (1.0 + 0.03 * np.sin(2 * np.pi * u(5.0, 6.0) * t))
        y = voice(f0, ((u(580, 640), 60), (u(950, 1050), 80), (2600, 150)), fs)
    elif mood == "cry":
        f0 = u(400, 440) * np.exp(-0.15 * (t % u(0.7, 0.9)))
        f0 = _jitter_track(f0, 0.04, rng, fs)
        y = voice(f0, ((u(950, 1050), 150), (u(1700, 1900), 200), (3000, 250)), fs)
        y *= 0.6 + 0.4 * np.sin(2 * np.pi * u(6.0, 8.0) * t) ** 2
    elif mood == "arguing":
        f0 = u(150, 170) * (1.0 + 0.15 * np.sin(2 * np.pi * u(1.5, 2.5) * t))
        f0 = _jitter_track(f0, 0.015, rng, fs)
        y = voice(f0, ((u(680, 740), 70), (u(1150, 1250), 90), (2500, 120)), fs)
        y = np.tanh(3.0 * y)
        y *= 0.5 + 0.5 * _gate(t, u(3.5, 4.5), 0.7, u(0, 1))
    elif mood == "sigh":
        f0 = u(105, 120) * np.exp(-0.25 * t)
        v = voice(f0, ((u(450, 520), 120), (1300, 200)), fs)
        breath = resonator(rng.standard_normal(n), u(1600, 2000), 1500, fs)
        breath /= np.max(np.abs(breath))
        y = (0.45 * v + 0.55 * breath) * np.exp(-t / u(1.2, 1.6))
    else:
        raise ValueError(f"unknown mood {mood!r}")
    peak = np.max(np.abs(y))
    return y / peak if peak > 0 else y


# -- backgrounds ----------------------------------------------------------------

def background(env: str, n: int, rng: np.random.Generator, fs: int = CANONICAL_RATE) -> np.ndarray:
    """Unit-scaled background for one of the three environment classes."""
    t = np.arange(n) / fs
    if env == "indoor":
        brown = np.cumsum(rng.standard_normal(n))
        brown = lfilter([1.0], [1.0, -0.995], np.diff(brown, prepend=0.0))
        brown = lfilter([0.05], [1.0, -0.95], brown)
        hum = 0.3 * np.sin(2 * np.pi * 60.0 * t)
        y = brown / np.std(brown) + hum
        level = 0.01
    elif env == "outdoor":
        white = rng.standard_normal(n)
        gust = 1.0 + 0.5 * np.sin(2 * np.pi * rng.uniform(0.2, 0.5) * t + rng.uniform(0, 6.3))
        y = white * gust
        level = 0.08
    elif env == "tv_music":
        y = np.zeros(n)
        note_len = int(0.5 * fs)
        for start in range(0, n, note_len):
            seg = slice(start, min(start + note_len, n))
            root = 220.0 * 2 ** (rng.integers(0, 12) / 12)
            for ratio in (1.0, 1.26, 1.5):
                y[seg] += np.sin(2 * np.pi * root * ratio * t[seg])
        y += 0.1 * rng.standard_normal(n)
        level = 0.05
    else:
        raise ValueError(f"unknown environment {env!r}")
    return level * y / np.std(y)


def phrase_envelope(n: int, rng: np.random.Generator, fs: int = CANONICAL_RATE) -> np.ndarray:
    """Utterances of 0.5-0.9 s separated by 0.2-0.35 s pauses, with soft edges."""
    env = np.zeros(n)
    pos = 0
    while pos < n:
        length = int(rng.uniform(0.5, 0.9) * fs)
        env[pos : pos + length] = 1.0
        pos += length + int(rng.uniform(0.2, 0.35) * fs)
    kernel = np.hanning(int(0.03 * fs) + 1)
    return np.convolve(env, kernel / kernel.sum(), mode="same")


def mood_clip(
    mood: str,
    env: str,
    seed: int,
    seconds: float = 3.0,
    lead_s: float = 0.6,
    fs: int = CANONICAL_RATE,
) -> AudioClip:
    """Background alone for ``lead_s`` seconds, then phrased mood vocalisation over it."""
    rng = np.random.default_rng(seed)
    n = int(round(seconds * fs))
    lead = int(round(lead_s * fs))
    x = background(env, n, rng, fs)
    v = mood_voice(mood, (n - lead) / fs, rng, fs)
    x[lead:] += 0.5 * v * phrase_envelope(v.size, rng, fs)
    return AudioClip(np.clip(x, -1.0, 1.0), fs, f"{mood}_{env}_{seed}")


def corpus(n_clips: int = 50, seed: int = 0, seconds: float = 3.0) -> list[tuple[AudioClip, str, str]]:
    """Balanced (clip, mood, environment) triples cycling through every combination."""
    out = []
    for i in range(n_clips):
        mood = MOODS[i % len(MOODS)]
        env = ENVIRONMENTS[(i // len(MOODS)) % len(ENVIRONMENTS)]
        out.append((mood_clip(mood, env, seed * 100003 + i, seconds), mood, env))
    return out
