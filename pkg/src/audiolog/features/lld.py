"""Frame-level low-level descriptors and their clip-level functionals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft

from ..audio_io import AudioClip
from ..dsp import BIN_HZ, FFT_SIZE, FRAME_LEN, HOP, N_BINS, frame_array
from ..errors import EmptyClip
from .pitch import PitchConfig, PitchTrack, track_from_frames
from .spectral import centroid_per_frame, entropy_per_frame, flatness_per_frame, flux_per_frame

N_MFCC = 13
N_MEL = 26
MEL_FMIN = 50.0
MEL_FMAX = 5512.5
LOG_FLOOR = 1e-10

LLD_COLUMNS = (
    ("energy", "zcr")
    + tuple(f"mfcc_{i}" for i in range(N_MFCC))
    + ("centroid", "flux", "entropy", "flatness", "f0", "voicing_prob")
)
FUNCTIONALS = ("mean", "std", "min", "max", "range")


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@lru_cache(maxsize=8)
def mel_filterbank(
    n_filters: int = N_MEL, n_bins: int = N_BINS, bin_hz: float = BIN_HZ, fmin: float = MEL_FMIN, fmax: float = MEL_FMAX
) -> np.ndarray:
    """Triangular filters equally spaced in mel, shape ``(n_filters, n_bins)``."""
    edges = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_filters + 2))
    f = np.arange(n_bins) * bin_hz
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rise = (f - lo) / (mid - lo)
    fall = (hi - f) / (hi - mid)
    bank = np.maximum(0.0, np.minimum(rise, fall))
    bank.setflags(write=False)
    return bank


def mfcc_from_power(power: np.ndarray, n_mfcc: int = N_MFCC) -> np.ndarray:
    energies = np.atleast_2d(power) @ mel_filterbank().T
    return sfft.dct(np.log(np.maximum(energies, LOG_FLOOR)), type=2, norm="ortho", axis=1)[:, :n_mfcc]


def zero_crossing_rate(frames: np.ndarray) -> np.ndarray:
    s = np.signbit(frames)
    return np.mean(s[:, 1:] != s[:, :-1], axis=1)


@dataclass(frozen=True)
class LldMatrix:
    frames: np.ndarray  # (n_frames, len(LLD_COLUMNS))
    columns: tuple[str, ...] = LLD_COLUMNS

    @property
    def functionals(self) -> np.ndarray:
        """Per-column mean, std, min, max, range, flattened column by column."""
        x = self.frames
        lo, hi = x.min(axis=0), x.max(axis=0)
        stats = np.stack([x.mean(axis=0), x.std(axis=0), lo, hi, hi - lo], axis=1)
        return stats.reshape(-1)

    @property
    def functional_names(self) -> list[str]:
        return [f"{c}_{f}" for c in self.columns for f in FUNCTIONALS]

    def column(self, name: str) -> np.ndarray:
        return self.frames[:, self.columns.index(name)]

    def functional(self, column: str, stat: str) -> float:
        i = self.columns.index(column) * len(FUNCTIONALS) + FUNCTIONALS.index(stat)
        return float(self.functionals[i])


def extract_lld(clip: AudioClip, track: PitchTrack | None = None, pitch_cfg: PitchConfig = PitchConfig()) -> LldMatrix:
    if len(clip) == 0:
        raise EmptyClip(clip.source_id or "clip has no samples")
    raw = frame_array(clip.samples, FRAME_LEN, HOP, "rect")
    windowed = raw * np.hanning(FRAME_LEN)
    power = np.abs(np.fft.rfft(windowed, n=FFT_SIZE, axis=1)) ** 2
    if track is None:
        track = track_from_frames(raw, clip.sample_rate_hz, pitch_cfg)
    cols = [
        np.mean(raw**2, axis=1),
        zero_crossing_rate(raw),
        *mfcc_from_power(power).T,
        centroid_per_frame(np.sqrt(power)),
        flux_per_frame(power),
        entropy_per_frame(power),
        flatness_per_frame(power),
        track.f0_hz[: raw.shape[0]],
        np.clip(track.peak_corr[: raw.shape[0]], 0.0, 1.0),
    ]
    return LldMatrix(np.column_stack(cols))
