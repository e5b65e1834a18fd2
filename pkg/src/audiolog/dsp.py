"""Framing, STFT, autocorrelation, DCT and percentile kernels.

Frame geometry is fixed for the canonical 11025 Hz rate: 40 ms frames
(441 samples), a 110-sample hop (9.98 ms, the nearest integer to 10 ms)
and a 512-point FFT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .audio_io import CANONICAL_RATE, AudioClip
from .errors import EmptyClip, EmptySequence, KeepTooLarge, SilentFrame

FRAME_LEN = 441
HOP = 110
FFT_SIZE = 512
N_BINS = FFT_SIZE // 2 + 1
BIN_HZ = CANONICAL_RATE / FFT_SIZE

WINDOWS = ("hann", "rect")


@dataclass(frozen=True)
class FrameSeries:
    frames: np.ndarray  # (n_frames, frame_len)
    frame_len: int = FRAME_LEN
    hop: int = HOP
    window_fn: str = "rect"
    sample_rate_hz: int = CANONICAL_RATE

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class Spectrogram:
    spectrum: np.ndarray  # complex, (n_frames, N_BINS)
    mag: np.ndarray
    power: np.ndarray
    fft_size: int = FFT_SIZE
    bin_hz: float = BIN_HZ

    def __len__(self) -> int:
        return self.mag.shape[0]

    @property
    def n_bins(self) -> int:
        return self.mag.shape[1]


def window(name: str, n: int = FRAME_LEN) -> np.ndarray:
    if name == "hann":
        return np.hanning(n)
    if name == "rect":
        return np.ones(n)
    raise ValueError(f"unknown window {name!r}; expected one of {WINDOWS}")


def frame_count(n_samples: int, frame_len: int = FRAME_LEN, hop: int = HOP) -> int:
    if n_samples < frame_len:
        return 1
    return (n_samples - frame_len) // hop + 1


def frame_array(
    x: np.ndarray, frame_len: int = FRAME_LEN, hop: int = HOP, window_fn: str = "rect"
) -> np.ndarray:
    """Slice ``x`` into overlapping frames; short input is zero-padded to one frame."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise EmptyClip("cannot frame an empty signal")
    if x.size < frame_len:
        x = np.pad(x, (0, frame_len - x.size))
    n = frame_count(x.size, frame_len, hop)
    idx = np.arange(frame_len)[None, :] + hop * np.arange(n)[:, None]
    frames = x[idx]
    if window_fn != "rect":
        frames = frames * window(window_fn, frame_len)
    return frames


def frame_signal(clip: AudioClip, window_fn: str = "rect") -> FrameSeries:
    frames = frame_array(clip.samples, FRAME_LEN, HOP, window_fn)
    return FrameSeries(frames, FRAME_LEN, HOP, window_fn, clip.sample_rate_hz)


def stft(frames: FrameSeries | np.ndarray, fft_size: int = FFT_SIZE) -> Spectrogram:
    """Zero-pad each frame to ``fft_size`` and take the one-sided real FFT."""
    data = frames.frames if isinstance(frames, FrameSeries) else np.atleast_2d(frames)
    if data.shape[1] > fft_size:
        raise ValueError(f"frame length {data.shape[1]} exceeds fft size {fft_size}")
    spec = np.fft.rfft(data, n=fft_size, axis=1)
    mag = np.abs(spec)
    return Spectrogram(spec, mag, mag * mag, fft_size, CANONICAL_RATE / fft_size)


def one_sided_energy(power: np.ndarray, fft_size: int = FFT_SIZE) -> np.ndarray:
    """Time-domain frame energy recovered from one-sided power (Parseval)."""
    power = np.atleast_2d(power)
    full = power[:, 0] + 2.0 * power[:, 1:-1].sum(axis=1)
    if fft_size % 2 == 0:
        full = full + power[:, -1]
    else:
        full = full + 2.0 * power[:, -1]
    return full / fft_size


def nccf(frames: np.ndarray, max_lag: int) -> np.ndarray:
    """Normalized cross-correlation of each frame with its own lagged copy.

    ``R[l] = sum x[n] x[n+l] / sqrt(sum x[n]^2 * sum x[n+l]^2)`` over the
    overlapping part, so ``R[0] = 1`` and ``|R[l]| <= 1``. Rows that are all
    zero come back as zeros.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    n = frames.shape[1]
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must be in [0, {n - 1}]")
    # the ratio is scale-free; unit peak keeps tiny or huge frames out of under/overflow
    peak = np.abs(frames).max(axis=1, keepdims=True)
    frames = np.divide(frames, peak, out=np.zeros_like(frames), where=peak > 0)
    nfft = sfft.next_fast_len(2 * n)
    spec = np.fft.rfft(frames, n=nfft, axis=1)
    r = np.fft.irfft(spec * np.conj(spec), n=nfft, axis=1)[:, : max_lag + 1]
    sq = frames * frames
    csum = np.concatenate([np.zeros((frames.shape[0], 1)), np.cumsum(sq, axis=1)], axis=1)
    lags = np.arange(max_lag + 1)
    head = csum[:, n - lags]  # energy of x[0 : n-l]
    tail = np.cumsum(sq[:, ::-1], axis=1)[:, ::-1][:, lags]  # energy of x[l : n]
    denom = np.sqrt(head * tail)
    out = np.zeros_like(r)
    ok = denom > 0
    out[ok] = r[ok] / denom[ok]
    # FFT round-off is relative to the whole frame's energy; redo lags whose overlap carries almost none of it
    for i, lag in zip(*np.nonzero(ok & (denom < 1e-8 * csum[:, [n]]))):
        out[i, lag] = frames[i, : n - lag] @ frames[i, lag:] / denom[i, lag]
    out[:, 0] = np.where(csum[:, n] > 0, 1.0, 0.0)
    return np.clip(out, -1.0, 1.0)


def autocorrelation(frame: np.ndarray, max_lag: int) -> np.ndarray:
    frame = np.asarray(frame, dtype=np.float64).reshape(-1)
    if not np.any(frame):
        raise SilentFrame("autocorrelation of an all-zero frame")
    return nccf(frame[None, :], max_lag)[0]


def dct_2(vector: np.ndarray, keep: int | None = None) -> np.ndarray:
    """Orthonormal DCT-II, truncated to the first ``keep`` coefficients."""
    v = np.asarray(vector, dtype=np.float64).reshape(-1)
    keep = v.size if keep is None else keep
    if keep > v.size:
        raise KeepTooLarge(f"keep={keep} exceeds vector length {v.size}")
    if keep < 0:
        raise ValueError("keep must be non-negative")
    return sfft.dct(v, type=2, norm="ortho")[:keep]


def idct_2(coeffs: np.ndarray) -> np.ndarray:
    return sfft.idct(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def percentile(values, p: float) -> float:
    """Percentile with linear interpolation between order statistics at rank p/100*(n-1)."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptySequence("percentile of an empty sequence")
    if not 0.0 <= p <= 100.0:
        raise ValueError("p must lie in [0, 100]")
    return float(np.percentile(v, p, method="linear"))
