"""Spectral shape features and psychoacoustic sharpness.

Per-frame functions take a ``(n_frames, n_bins)`` array and return one
value per frame; the clip-level functions average over frames that carry
energy and raise :class:`AllFramesSilent` when none do.
"""

from __future__ import annotations

import numpy as np

from ..dsp import BIN_HZ, Spectrogram
from ..errors import AllFramesSilent, TooFewFrames

FLATNESS_FLOOR = 1e-12
N_BARK_BANDS = 24
LOUDNESS_EXPONENT = 0.23


def _as_2d(x) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=np.float64))


def _mag(spec) -> np.ndarray:
    return spec.mag if isinstance(spec, Spectrogram) else _as_2d(spec)


def _power(spec) -> np.ndarray:
    return spec.power if isinstance(spec, Spectrogram) else _as_2d(spec)


def _clip_mean(values: np.ndarray, active: np.ndarray, what: str) -> float:
    if not active.any():
        raise AllFramesSilent(f"{what}: every frame is silent")
    return float(values[active].mean())


# -- centroid ---------------------------------------------------------------

def centroid_per_frame(mag: np.ndarray) -> np.ndarray:
    """Amplitude-weighted mean bin index; 0 for silent frames."""
    mag = _as_2d(mag)
    total = mag.sum(axis=1)
    k = np.arange(mag.shape[1])
    out = np.zeros(mag.shape[0])
    ok = total > 0
    out[ok] = (mag[ok] @ k) / total[ok]
    return out


def spectral_centroid(spec) -> float:
    """Clip-average spectral centroid, in bins."""
    mag = _mag(spec)
    return _clip_mean(centroid_per_frame(mag), mag.sum(axis=1) > 0, "spectral centroid")


def spectral_centroid_hz(spec) -> float:
    bin_hz = spec.bin_hz if isinstance(spec, Spectrogram) else BIN_HZ
    return spectral_centroid(spec) * bin_hz


# -- flux -------------------------------------------------------------------

def _normalized(power: np.ndarray) -> np.ndarray:
    total = power.sum(axis=1, keepdims=True)
    return np.divide(power, total, out=np.zeros_like(power), where=total > 0)


def flux_per_frame(power: np.ndarray) -> np.ndarray:
    """L2 distance between consecutive L1-normalised power spectra; frame 0 gets 0."""
    p = _normalized(_as_2d(power))
    out = np.zeros(p.shape[0])
    out[1:] = np.linalg.norm(np.diff(p, axis=0), axis=1)
    return out


def spectral_flux(spec) -> float:
    power = _power(spec)
    if power.shape[0] < 2:
        raise TooFewFrames("spectral flux needs at least 2 frames")
    return float(flux_per_frame(power)[1:].mean())


# -- entropy ----------------------------------------------------------------

def entropy_per_frame(power: np.ndarray) -> np.ndarray:
    """Shannon entropy of the normalised power spectrum over log(n_bins)."""
    p = _normalized(_as_2d(power))
    logp = np.log(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logp).sum(axis=1) / np.log(p.shape[1])


def spectral_entropy(spec) -> float:
    power = _power(spec)
    return _clip_mean(entropy_per_frame(power), power.sum(axis=1) > 0, "spectral entropy")


# -- flatness ---------------------------------------------------------------

def flatness_per_frame(power: np.ndarray) -> np.ndarray:
    power = _as_2d(power)
    am = power.mean(axis=1)
    gm = np.exp(np.mean(np.log(np.maximum(power, FLATNESS_FLOOR)), axis=1))
    out = np.zeros(power.shape[0])
    ok = am > 0
    out[ok] = np.minimum(gm[ok] / am[ok], 1.0)
    return out


def spectral_flatness(spec) -> float:
    power = _power(spec)
    return _clip_mean(flatness_per_frame(power), power.sum(axis=1) > 0, "spectral flatness")


# -- sharpness --------------------------------------------------------------

def bark(f_hz) -> np.ndarray:
    f = np.asarray(f_hz, dtype=np.float64)
    return 13.0 * np.arctan(0.00076 * f) + 3.5 * np.arctan((f / 7500.0) ** 2)


def band_rates() -> np.ndarray:
    """Critical-band rate assigned to each of the 24 bands: 1, 2, ..., 24 Bark."""
    return np.arange(1, N_BARK_BANDS + 1, dtype=np.float64)


def sharpness_weight(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    return np.where(z <= 15.8, 1.0, 0.15 * np.exp(0.42 * (z - 15.8)) + 0.85)


def bark_band_index(n_bins: int, bin_hz: float = BIN_HZ) -> np.ndarray:
    """Band (0-based) of each FFT bin: band b holds Bark rates [b, b+1)."""
    z = bark(np.arange(n_bins) * bin_hz)
    return np.clip(np.floor(z).astype(int), 0, N_BARK_BANDS - 1)


def band_powers(power: np.ndarray, bin_hz: float = BIN_HZ) -> np.ndarray:
    power = _as_2d(power)
    idx = bark_band_index(power.shape[1], bin_hz)
    out = np.zeros((power.shape[0], N_BARK_BANDS))
    np.add.at(out.T, idx, power.T)
    return out


def sharpness_from_loudness(loudness) -> np.ndarray:
    """Weighted first moment of specific loudness over the 24 band rates, in acum."""
    l0 = _as_2d(loudness)
    z = band_rates()
    num = l0 @ (sharpness_weight(z) * z)
    den = l0.sum(axis=1)
    out = np.zeros(l0.shape[0])
    ok = den > 0
    out[ok] = 0.11 * num[ok] / den[ok]
    return out


def sharpness_per_frame(power: np.ndarray, bin_hz: float = BIN_HZ) -> np.ndarray:
    return sharpness_from_loudness(band_powers(power, bin_hz) ** LOUDNESS_EXPONENT)


def sharpness_acum(spec) -> float:
    power = _power(spec)
    bin_hz = spec.bin_hz if isinstance(spec, Spectrogram) else BIN_HZ
    return _clip_mean(sharpness_per_frame(power, bin_hz), power.sum(axis=1) > 0, "sharpness")
