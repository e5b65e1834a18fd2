"""Curated feature set, fused feature vectors and z-normalisation."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..audio_io import AudioClip
from ..dsp import dct_2, frame_signal, stft
from ..errors import AllFramesSilent, InsufficientVoicing, KeepTooLarge, TooFewFrames, ZeroAmplitudeFrame
from . import spectral, voice
from .lld import LldMatrix, extract_lld
from .pitch import PitchConfig, PitchTrack, track_pitch

DEFAULT_KEEP = 3000


@dataclass(frozen=True)
class FeatureConfig:
    keep: int | None = None  # None -> min(3000, functional length)
    jitter_divisor: str = "M"
    pitch: PitchConfig = PitchConfig()


@dataclass(frozen=True)
class CuratedFeatures:
    jitter_abs_s: float = 0.0
    jitter_rel_pct: float = 0.0
    shimmer_db: float = 0.0
    freq_modulation: float = 0.0
    freq_range_hz: float = 0.0
    hnr_mean_db: float = 0.0
    hnr_std_db: float = 0.0
    spectral_centroid: float = 0.0
    spectral_flux: float = 0.0
    spectral_entropy: float = 0.0
    spectral_flatness: float = 0.0
    sharpness_acum: float = 0.0
    spectral_centroid_hz: float = field(default=0.0, compare=False)
    flags: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)][:12]

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.names()], dtype=np.float64)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d


def _try(values: dict, flags: list, keys, fn, *args, **kwargs):
    try:
        out = fn(*args, **kwargs)
    except (InsufficientVoicing, ZeroAmplitudeFrame, AllFramesSilent, TooFewFrames) as exc:
        flags.append(f"{keys[0] if isinstance(keys, tuple) else keys}: {type(exc).__name__}")
        return
    if isinstance(keys, tuple):
        values.update(zip(keys, out))
    else:
        values[keys] = out


def compute_curated(
    clip: AudioClip, track: PitchTrack | None = None, cfg: FeatureConfig = FeatureConfig()
) -> CuratedFeatures:
    """All twelve curated scalars; undefined ones are 0 and named in ``flags``."""
    track = track if track is not None else track_pitch(clip, cfg.pitch)
    spec = stft(frame_signal(clip, "hann"))
    v: dict = {}
    flags: list[str] = []
    _try(v, flags, "jitter_abs_s", voice.jitter_abs, track, cfg.jitter_divisor)
    _try(v, flags, "jitter_rel_pct", voice.jitter_rel, track)
    _try(v, flags, "shimmer_db", voice.shimmer_db, clip, track, cfg.jitter_divisor)
    _try(v, flags, "freq_modulation", voice.freq_modulation, track)
    _try(v, flags, "freq_range_hz", voice.freq_range, track)
    _try(v, flags, ("hnr_mean_db", "hnr_std_db"), voice.hnr_segmental, clip, track, cfg.pitch)
    _try(v, flags, "spectral_centroid", spectral.spectral_centroid, spec)
    _try(v, flags, "spectral_flux", spectral.spectral_flux, spec)
    _try(v, flags, "spectral_entropy", spectral.spectral_entropy, spec)
    _try(v, flags, "spectral_flatness", spectral.spectral_flatness, spec)
    _try(v, flags, "sharpness_acum", spectral.sharpness_acum, spec)
    v["spectral_centroid_hz"] = v.get("spectral_centroid", 0.0) * spec.bin_hz
    return CuratedFeatures(**v, flags=tuple(flags))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    names: tuple[str, ...]

    def __len__(self) -> int:
        return self.values.size


def resolve_keep(keep: int | None, n: int) -> int:
    return min(DEFAULT_KEEP, n) if keep is None else keep


def assemble_feature_vector(curated: CuratedFeatures, lld: LldMatrix, keep: int | None = None) -> FeatureVector:
    """DCT-decorrelated LLD functionals truncated to ``keep``, then the curated scalars."""
    func = lld.functionals
    keep = resolve_keep(keep, func.size)
    if keep > func.size:
        raise KeepTooLarge(f"keep={keep} exceeds {func.size} LLD functionals")
    values = np.concatenate([dct_2(func, keep), curated.as_vector()])
    names = tuple(f"lld_dct_{i}" for i in range(keep)) + tuple(CuratedFeatures.names())
    return FeatureVector(values, names)


def clip_features(
    clip: AudioClip, cfg: FeatureConfig = FeatureConfig()
) -> tuple[FeatureVector, CuratedFeatures, LldMatrix]:
    """Pitch, curated scalars, LLDs and the fused vector for one clip or segment."""
    track = track_pitch(clip, cfg.pitch)
    curated = compute_curated(clip, track, cfg)
    lld = extract_lld(clip, track, cfg.pitch)
    return assemble_feature_vector(curated, lld, cfg.keep), curated, lld


@dataclass
class ZScaler:
    """Per-dimension standardisation fitted on a training matrix."""

    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def fit(self, rows) -> ZScaler:
        x = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        self.mean = x.mean(axis=0)
        std = x.std(axis=0)
        self.std = np.where(std > 1e-12, std, 1.0)
        return self

    def transform(self, rows) -> np.ndarray:
        return (np.asarray(rows, dtype=np.float64) - self.mean) / self.std

    def fit_transform(self, rows) -> np.ndarray:
        return self.fit(rows).transform(rows)
