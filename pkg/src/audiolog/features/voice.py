"""Voice-quality measures over the voiced frames of a pitch track.

``M`` is the number of voiced frames; consecutive pairs are taken over the
voiced subsequence. Jitter and shimmer keep the ``1/M`` normalisation in
front of a sum of ``M - 1`` terms; ``divisor="M-1"`` gives the textbook
average instead.
"""

from __future__ import annotations

import numpy as np

from ..audio_io import AudioClip
from ..dsp import FRAME_LEN, HOP, frame_array, percentile
from ..errors import InsufficientVoicing, ZeroAmplitudeFrame
from .pitch import PitchConfig, PitchTrack, frame_correlations, lag_range

HNR_CLAMP = 1e-6


def _periods(track) -> np.ndarray:
    if isinstance(track, PitchTrack):
        return track.voiced_periods
    return np.asarray(track, dtype=np.float64).reshape(-1)


def _f0(track) -> np.ndarray:
    if isinstance(track, PitchTrack):
        return track.voiced_f0
    return np.asarray(track, dtype=np.float64).reshape(-1)


def _divisor(m: int, divisor: str) -> int:
    if divisor == "M":
        return m
    if divisor == "M-1":
        return m - 1
    raise ValueError(f"divisor must be 'M' or 'M-1', got {divisor!r}")


def jitter_abs(track, divisor: str = "M") -> float:
    """Absolute jitter in seconds. ``track`` is a PitchTrack or a period sequence."""
    f = _periods(track)
    if f.size < 2:
        raise InsufficientVoicing(f"jitter needs 2 voiced periods, got {f.size}")
    return float(np.sum(np.abs(np.diff(f))) / _divisor(f.size, divisor))


def jitter_rel(track) -> float:
    """Relative jitter in percent; the denominator sums the first M-1 periods."""
    f = _periods(track)
    if f.size < 2:
        raise InsufficientVoicing(f"jitter needs 2 voiced periods, got {f.size}")
    den = np.sum(np.abs(f[:-1]))
    if den <= 0.0:
        raise InsufficientVoicing("mean period is zero")
    return float(100.0 * np.sum(np.abs(np.diff(f))) / den)


def frame_peak_amplitudes(clip: AudioClip, track: PitchTrack) -> np.ndarray:
    frames = frame_array(clip.samples, FRAME_LEN, HOP, "rect")
    return np.max(np.abs(frames[: len(track)][track.voiced]), axis=1)


def shimmer_from_amplitudes(amplitudes, divisor: str = "M") -> float:
    a = np.asarray(amplitudes, dtype=np.float64).reshape(-1)
    if a.size < 2:
        raise InsufficientVoicing(f"shimmer needs 2 voiced frames, got {a.size}")
    if np.any(a <= 0.0):
        raise ZeroAmplitudeFrame("voiced frame with zero peak amplitude")
    return float(20.0 * np.sum(np.abs(np.log10(a[:-1] / a[1:]))) / _divisor(a.size, divisor))


def shimmer_db(clip: AudioClip, track: PitchTrack, divisor: str = "M") -> float:
    return shimmer_from_amplitudes(frame_peak_amplitudes(clip, track), divisor)


def freq_modulation(track) -> float:
    f = _f0(track)
    if f.size == 0:
        raise InsufficientVoicing("no voiced frames")
    hi, lo = f.max(), f.min()
    return float((hi - lo) / (hi + lo))


def freq_range(track) -> float:
    f = _f0(track)
    if f.size == 0:
        raise InsufficientVoicing("no voiced frames")
    return percentile(f, 95.0) - percentile(f, 5.0)


def hnr_db(r) -> np.ndarray | float:
    """Harmonics-to-noise ratio from the peak normalised autocorrelation."""
    r = np.clip(np.asarray(r, dtype=np.float64), HNR_CLAMP, 1.0 - HNR_CLAMP)
    out = 10.0 * np.log10(r / (1.0 - r))
    return float(out) if out.ndim == 0 else out


def frame_hnr(clip: AudioClip, track: PitchTrack, cfg: PitchConfig = PitchConfig()) -> np.ndarray:
    """Per-voiced-frame HNR using the autocorrelation maximum over the pitch lag range."""
    frames = frame_array(clip.samples, FRAME_LEN, HOP, "rect")[: len(track)][track.voiced]
    if frames.shape[0] == 0:
        return np.zeros(0)
    lo, hi = lag_range(clip.sample_rate_hz, cfg)
    corr = frame_correlations(frames, clip.sample_rate_hz, cfg)
    return hnr_db(corr[:, lo : hi + 1].max(axis=1))


def hnr_segmental(clip: AudioClip, track: PitchTrack, cfg: PitchConfig = PitchConfig()) -> tuple[float, float]:
    """Mean and population standard deviation of per-frame HNR (dB)."""
    per_frame = frame_hnr(clip, track, cfg)
    if per_frame.size == 0:
        raise InsufficientVoicing("no voiced frames")
    return float(per_frame.mean()), float(per_frame.std())
