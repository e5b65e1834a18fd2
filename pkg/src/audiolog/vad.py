"""Frame-level speech detection and silence suppression.

The decision statistic is the posterior SNR of each frame against a
minimum-statistics noise floor: frame energies are smoothed with a
first-order recursion, the floor is the running minimum of the smoothed
energy over the last ``window_frames`` frames, and a frame is speech when
its energy exceeds the floor by ``threshold_db``. A hangover keeps short
pauses inside speech runs.

Stationary tones are a known blind spot: once the window has filled, the
floor sits at the tone's own energy and the SNR hovers near 0 dB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter1d

from .audio_io import AudioClip
from .dsp import FrameSeries
from .errors import NoSpeechDetected


@dataclass(frozen=True)
class VadConfig:
    window_frames: int = 100
    threshold_db: float = 6.0
    hangover_frames: int = 8
    smoothing: float = 0.9
    eps: float = 1e-10


@dataclass(frozen=True)
class VadDecision:
    speech_flags: np.ndarray
    posterior_snr_db: np.ndarray
    noise_floor: np.ndarray
    energy: np.ndarray
    hop: int = 110
    frame_len: int = 441

    def __len__(self) -> int:
        return self.speech_flags.size

    @property
    def speech_fraction(self) -> float:
        return float(np.mean(self.speech_flags)) if self.speech_flags.size else 0.0

    @classmethod
    def all_speech(cls, n_frames: int, hop: int = 110, frame_len: int = 441) -> VadDecision:
        """Decision for audio already reduced to speech (every frame flagged)."""
        z = np.zeros(n_frames)
        return cls(np.ones(n_frames, dtype=bool), z, z, z, hop, frame_len)


def smooth_energy(energy: np.ndarray, alpha: float) -> np.ndarray:
    out = np.empty_like(energy)
    acc = energy[0]
    for t, e in enumerate(energy):
        acc = alpha * acc + (1.0 - alpha) * e
        out[t] = acc
    return out


def apply_hangover(flags: np.ndarray, hangover: int) -> np.ndarray:
    if hangover <= 0 or not flags.any():
        return flags.copy()
    out = flags.copy()
    for t in np.flatnonzero(flags):
        out[t + 1 : t + 1 + hangover] = True
    return out


def detect_speech(frames: FrameSeries, cfg: VadConfig = VadConfig()) -> VadDecision:
    energy = np.mean(frames.frames**2, axis=1)
    smoothed = smooth_energy(energy, cfg.smoothing)
    # trailing window: floor[t] = min(smoothed[t-W+1 .. t])
    w = max(int(cfg.window_frames), 1)
    origin = (w - 1) // 2
    floor = minimum_filter1d(smoothed, size=w, mode="nearest", origin=origin)
    snr_db = 10.0 * np.log10(np.maximum(energy, cfg.eps) / np.maximum(floor, cfg.eps))
    flags = apply_hangover(snr_db > cfg.threshold_db, cfg.hangover_frames)
    return VadDecision(flags, snr_db, floor, energy, frames.hop, frames.frame_len)


def speech_sample_mask(n_samples: int, decision: VadDecision) -> np.ndarray:
    """Sample mask selected by :func:`suppress_silence`.

    Frame ``t`` owns samples ``[t*hop, t*hop + hop)``; the final frame owns
    its whole span so the tail of the clip is not lost.
    """
    mask = np.zeros(n_samples, dtype=bool)
    hop, n = decision.hop, len(decision)
    for t in np.flatnonzero(decision.speech_flags):
        stop = t * hop + (decision.frame_len if t == n - 1 else hop)
        mask[t * hop : min(stop, n_samples)] = True
    return mask


def suppress_silence(clip: AudioClip, decision: VadDecision) -> AudioClip:
    if not decision.speech_flags.any():
        raise NoSpeechDetected(clip.source_id or "no speech frames")
    mask = speech_sample_mask(len(clip), decision)
    return clip.with_samples(clip.samples[mask])
