"""STFT-domain noise suppression and the CSNE metric.

The suppressor follows the optimally-modified log-spectral amplitude
recipe with two speech-presence functions:

* noise tracking uses presence from the ratio of recursively smoothed
  power to its minimum over the last ``minima_window`` frames
  (minima-controlled recursive averaging);
* the spectral gain uses the conditional presence probability derived
  from the time-frequency distribution of the a-priori SNR.

The per-bin minimum is median-filtered across ``presence_band_bins``
neighbouring bins before the ratio is taken, so a stationary narrowband
component (a held vowel, a tone) is not mistaken for the noise floor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import median_filter, minimum_filter1d
from scipy.special import exp1

from .audio_io import AudioClip
from .dsp import FFT_SIZE, FRAME_LEN, HOP, frame_array, window
from .errors import EmptyClip, LengthMismatch

_EPS = 1e-12


@dataclass(frozen=True)
class DenoiseConfig:
    alpha_d: float = 0.95
    alpha_dd: float = 0.92
    delta: float = 5.0
    minima_window: int = 150
    gain_floor_db: float = -25.0
    power_smoothing: float = 0.8
    presence_smoothing: float = 0.2
    presence_band_bins: int = 8
    xi_min_db: float = -18.0
    xi_smoothing: float = 0.7
    xi_local_bins: int = 3
    xi_global_bins: int = 31
    xi_presence_low_db: float = -10.0
    xi_presence_high_db: float = -5.0
    q_max: float = 0.95
    csne_cap_db: float = 100.0

    @property
    def gain_floor(self) -> float:
        return 10.0 ** (self.gain_floor_db / 20.0)


@dataclass(frozen=True)
class NoiseEstimate:
    psd: np.ndarray  # (n_frames, n_bins) noise power
    presence_prob: np.ndarray  # ratio-based presence used for noise tracking
    minima_window: int


@dataclass(frozen=True)
class DenoiseTrace:
    gains: np.ndarray
    gain_presence: np.ndarray  # a-priori-SNR presence used in the gain
    noise: NoiseEstimate
    a_priori_snr: np.ndarray
    posterior_snr: np.ndarray


def lsa_gain(xi: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Log-spectral amplitude gain ``xi/(1+xi) * exp(E1(v)/2)``, ``v = xi*gamma/(1+xi)``."""
    xi = np.asarray(xi, dtype=np.float64)
    v = np.maximum(xi * gamma / (1.0 + xi), 1e-10)
    return xi / (1.0 + xi) * np.exp(0.5 * exp1(v))


def _freq_average(x: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return x
    w = np.hanning(width + 2)[1:-1]
    w /= w.sum()
    pad = width // 2
    xp = np.pad(x, (pad, pad), mode="edge")
    return np.convolve(xp, w, mode="valid")


def _presence_map(zeta: np.ndarray, low: float, high: float) -> np.ndarray:
    out = np.log(np.maximum(zeta, _EPS) / low) / np.log(high / low)
    return np.clip(out, 0.0, 1.0)


def _pad_for_ola(x: np.ndarray) -> tuple[np.ndarray, int]:
    lead = FRAME_LEN - HOP
    n_frames = -(-(x.size + 2 * lead - FRAME_LEN) // HOP) + 1
    tail = (n_frames - 1) * HOP + FRAME_LEN - x.size - lead
    mode = "reflect" if x.size > 1 else "edge"
    return np.pad(x, (lead, tail), mode=mode), lead


def overlap_add(frames: np.ndarray, n_out: int, hop: int = HOP) -> np.ndarray:
    """Weighted overlap-add with hann synthesis, normalised by the summed squared window."""
    w = window("hann", frames.shape[1])
    out = np.zeros(n_out)
    norm = np.zeros(n_out)
    for t, f in enumerate(frames):
        s = t * hop
        out[s : s + frames.shape[1]] += f * w
        norm[s : s + frames.shape[1]] += w * w
    good = norm > 1e-8
    out[good] /= norm[good]
    out[~good] = 0.0
    return out


def analyze(x: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Hann-windowed STFT of ``x`` after reflect-padding for full OLA coverage."""
    padded, lead = _pad_for_ola(x)
    frames = frame_array(padded, FRAME_LEN, HOP, "hann")
    return np.fft.rfft(frames, n=FFT_SIZE, axis=1), lead, padded.size


def synthesize(spec: np.ndarray, lead: int, n_padded: int, n_out: int) -> np.ndarray:
    frames = np.fft.irfft(spec, n=FFT_SIZE, axis=1)[:, :FRAME_LEN]
    return overlap_add(frames, n_padded)[lead : lead + n_out]


def _track_noise(power: np.ndarray, cfg: DenoiseConfig) -> NoiseEstimate:
    n_frames, _ = power.shape
    smoothed = np.empty_like(power)
    s = _freq_average(power[0], 3)
    for t in range(n_frames):
        s = cfg.power_smoothing * s + (1.0 - cfg.power_smoothing) * _freq_average(power[t], 3)
        smoothed[t] = s
    w = max(int(cfg.minima_window), 1)
    s_min = minimum_filter1d(smoothed, size=w, axis=0, mode="nearest", origin=(w - 1) // 2)
    if cfg.presence_band_bins > 0:
        s_min = median_filter(s_min, size=(1, 2 * cfg.presence_band_bins + 1), mode="nearest")
    indicator = (smoothed / np.maximum(s_min, _EPS)) > cfg.delta

    psd = np.empty_like(power)
    presence = np.empty_like(power)
    lam = median_filter(smoothed[0], size=2 * cfg.presence_band_bins + 1, mode="nearest")
    p = np.zeros(power.shape[1])
    for t in range(n_frames):
        p = cfg.presence_smoothing * p + (1.0 - cfg.presence_smoothing) * indicator[t]
        a = cfg.alpha_d + (1.0 - cfg.alpha_d) * p
        lam = a * lam + (1.0 - a) * power[t]
        psd[t] = lam
        presence[t] = p
    return NoiseEstimate(psd, presence, w)


def denoise_with_trace(clip: AudioClip, cfg: DenoiseConfig = DenoiseConfig()) -> tuple[AudioClip, DenoiseTrace]:
    if len(clip) == 0:
        raise EmptyClip(clip.source_id or "clip has no samples")
    spec, lead, n_padded = analyze(clip.samples)
    power = spec.real**2 + spec.imag**2
    noise = _track_noise(power, cfg)

    g_min = cfg.gain_floor
    xi_min = 10.0 ** (cfg.xi_min_db / 10.0)
    z_lo = 10.0 ** (cfg.xi_presence_low_db / 10.0)
    z_hi = 10.0 ** (cfg.xi_presence_high_db / 10.0)

    gains = np.empty_like(power)
    xis = np.empty_like(power)
    gammas = np.empty_like(power)
    pgain = np.empty_like(power)
    prev = np.ones(power.shape[1])  # G^2 * gamma of the previous frame
    zeta = None
    for t in range(power.shape[0]):
        gamma = power[t] / np.maximum(noise.psd[t], _EPS)
        xi = cfg.alpha_dd * prev + (1.0 - cfg.alpha_dd) * np.maximum(gamma - 1.0, 0.0)
        xi = np.maximum(xi, xi_min)
        zeta = xi if zeta is None else cfg.xi_smoothing * zeta + (1.0 - cfg.xi_smoothing) * xi
        p_local = _presence_map(_freq_average(zeta, cfg.xi_local_bins), z_lo, z_hi)
        p_global = _presence_map(_freq_average(zeta, cfg.xi_global_bins), z_lo, z_hi)
        q = np.clip(1.0 - p_local * p_global, 0.0, cfg.q_max)
        v = xi * gamma / (1.0 + xi)
        p = 1.0 / (1.0 + q / (1.0 - q) * (1.0 + xi) * np.exp(-v))
        g_lsa = lsa_gain(xi, gamma)
        g = np.maximum(np.minimum(g_lsa, 1.0) ** p * g_min ** (1.0 - p), g_min)
        prev = g_lsa**2 * gamma
        gains[t], xis[t], gammas[t], pgain[t] = g, xi, gamma, p

    out = synthesize(spec * gains, lead, n_padded, len(clip))
    trace = DenoiseTrace(gains, pgain, noise, xis, gammas)
    return clip.with_samples(np.clip(out, -1.0, 1.0)), trace


def denoise(clip: AudioClip, cfg: DenoiseConfig = DenoiseConfig()) -> AudioClip:
    return denoise_with_trace(clip, cfg)[0]


def write_gain_csv(trace: DenoiseTrace, path: str | Path, bin_hz: float = 11025 / FFT_SIZE) -> None:
    """Dump per-frame gains, one row per frame, one column per bin."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame"] + [f"{k * bin_hz:.1f}Hz" for k in range(trace.gains.shape[1])])
        for t, row in enumerate(trace.gains):
            w.writerow([t] + [f"{g:.6g}" for g in row])


def csne_db(original: AudioClip | np.ndarray, enhanced: AudioClip | np.ndarray, cap_db: float = 100.0) -> float:
    """Change in signal-to-noise energy: enhanced energy over removed energy, in dB.

    Identical inputs give ``+cap_db``; the result is clamped to ``[-cap_db, cap_db]``.
    """
    s = original.samples if isinstance(original, AudioClip) else np.asarray(original, dtype=np.float64)
    e = enhanced.samples if isinstance(enhanced, AudioClip) else np.asarray(enhanced, dtype=np.float64)
    if s.shape != e.shape:
        raise LengthMismatch(f"{s.size} vs {e.size} samples")
    if s.size == 0:
        raise EmptyClip("CSNE of empty signals")
    num = float(np.sum(e * e))
    den = float(np.sum((e - s) ** 2))
    if den == 0.0:
        return cap_db
    if num == 0.0:
        return -cap_db
    return float(np.clip(10.0 * np.log10(num / den), -cap_db, cap_db))
