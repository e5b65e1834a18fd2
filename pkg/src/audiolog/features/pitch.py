"""Autocorrelation pitch tracking on 40 ms frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..audio_io import AudioClip
from ..dsp import FRAME_LEN, HOP, frame_array, nccf


@dataclass(frozen=True)
class PitchConfig:
    fmin_hz: float = 50.0
    fmax_hz: float = 500.0
    voicing_threshold: float = 0.45
    # mean-square frame energy below which a frame is treated as silent (-60 dBFS)
    silence_floor: float = 1e-6
    # prefer the shortest lag whose correlation is within this of the best peak
    octave_tolerance: float = 0.03


@dataclass(frozen=True)
class PitchTrack:
    f0_hz: np.ndarray
    voiced: np.ndarray
    peak_corr: np.ndarray
    frame_energy: np.ndarray
    sample_rate_hz: int = 11025

    def __len__(self) -> int:
        return self.f0_hz.size

    @property
    def M(self) -> int:
        return int(np.count_nonzero(self.voiced))

    @property
    def period_s(self) -> np.ndarray:
        out = np.zeros_like(self.f0_hz)
        out[self.voiced] = 1.0 / self.f0_hz[self.voiced]
        return out

    @property
    def voiced_f0(self) -> np.ndarray:
        return self.f0_hz[self.voiced]

    @property
    def voiced_periods(self) -> np.ndarray:
        return 1.0 / self.f0_hz[self.voiced]


def lag_range(sample_rate: int, cfg: PitchConfig) -> tuple[int, int]:
    return int(np.floor(sample_rate / cfg.fmax_hz)), int(np.ceil(sample_rate / cfg.fmin_hz))


def pick_peak(r: np.ndarray, lo: int, hi: int, tolerance: float) -> int:
    """Lag of the chosen autocorrelation peak in ``[lo, hi]``.

    ``r`` must extend to ``hi + 1``. Among local maxima the shortest lag
    within ``tolerance`` of the highest one wins, which suppresses
    picking a multiple of the true period.
    """
    seg = r[lo : hi + 1]
    left = r[lo - 1 : hi]
    right = r[lo + 1 : hi + 2]
    peaks = np.flatnonzero((seg >= left) & (seg > right))
    if peaks.size == 0:
        return lo + int(np.argmax(seg))
    # compare peaks at their interpolated height so a period falling between
    # two lags is not beaten by a multiple that lands on an integer lag
    height = np.array([peak_height(r, lo + p) for p in peaks])
    return lo + int(peaks[np.argmax(height >= height.max() - tolerance)])


def parabolic_offset(r: np.ndarray, lag: int) -> float:
    a, b, c = r[lag - 1], r[lag], r[lag + 1]
    den = a - 2.0 * b + c
    if den >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (a - c) / den, -0.5, 0.5))


def peak_height(r: np.ndarray, lag: int) -> float:
    """Vertex of the parabola through ``r`` at ``lag - 1 .. lag + 1``, capped at 1."""
    a, b, c = r[lag - 1], r[lag], r[lag + 1]
    d = parabolic_offset(r, lag)
    return float(min(b - 0.25 * (a - c) * d, 1.0))


def frame_correlations(frames: np.ndarray, sample_rate: int, cfg: PitchConfig) -> np.ndarray:
    lo, hi = lag_range(sample_rate, cfg)
    centered = frames - frames.mean(axis=1, keepdims=True)
    return nccf(centered, hi + 1)


def track_from_frames(frames: np.ndarray, sample_rate: int = 11025, cfg: PitchConfig = PitchConfig()) -> PitchTrack:
    lo, hi = lag_range(sample_rate, cfg)
    energy = np.mean(frames**2, axis=1)
    corr = frame_correlations(frames, sample_rate, cfg)
    n = frames.shape[0]
    f0 = np.zeros(n)
    peak = np.zeros(n)
    voiced = np.zeros(n, dtype=bool)
    for t in range(n):
        if energy[t] <= cfg.silence_floor:
            continue
        r = corr[t]
        lag = pick_peak(r, lo, hi, cfg.octave_tolerance)
        peak[t] = r[lag]
        if r[lag] < cfg.voicing_threshold:
            continue
        f = sample_rate / (lag + parabolic_offset(r, lag))
        f0[t] = float(np.clip(f, cfg.fmin_hz, cfg.fmax_hz))
        voiced[t] = True
    return PitchTrack(f0, voiced, peak, energy, sample_rate)


def track_pitch(clip: AudioClip, cfg: PitchConfig = PitchConfig()) -> PitchTrack:
    frames = frame_array(clip.samples, FRAME_LEN, HOP, "rect")
    return track_from_frames(frames, clip.sample_rate_hz, cfg)
