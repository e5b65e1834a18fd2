"""Pitch tracking, curated voice/spectral features and LLD extraction."""

from .lld import LLD_COLUMNS, LldMatrix, extract_lld, mel_filterbank, mfcc_from_power
from .pitch import PitchConfig, PitchTrack, track_pitch
from .spectral import (
    sharpness_acum,
    spectral_centroid,
    spectral_centroid_hz,
    spectral_entropy,
    spectral_flatness,
    spectral_flux,
)
from .vector import (
    CuratedFeatures,
    FeatureConfig,
    FeatureVector,
    ZScaler,
    assemble_feature_vector,
    clip_features,
    compute_curated,
)
from .voice import freq_modulation, freq_range, hnr_db, hnr_segmental, jitter_abs, jitter_rel, shimmer_db

__all__ = [
    "LLD_COLUMNS",
    "CuratedFeatures",
    "FeatureConfig",
    "FeatureVector",
    "LldMatrix",
    "PitchConfig",
    "PitchTrack",
    "ZScaler",
    "assemble_feature_vector",
    "clip_features",
    "compute_curated",
    "extract_lld",
    "freq_modulation",
    "freq_range",
    "hnr_db",
    "hnr_segmental",
    "jitter_abs",
    "jitter_rel",
    "mel_filterbank",
    "mfcc_from_power",
    "sharpness_acum",
    "shimmer_db",
    "spectral_centroid",
    "spectral_centroid_hz",
    "spectral_entropy",
    "spectral_flatness",
    "spectral_flux",
    "track_pitch",
]
