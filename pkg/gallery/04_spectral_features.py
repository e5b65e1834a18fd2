"""
Spectral descriptors and the fused feature vector
=================================================
"""

import numpy as np

from audiolog import AudioClip, frame_signal, stft
from audiolog.features import spectral
from audiolog.features.lld import extract_lld
from audiolog.features.vector import clip_features
from audiolog.synth import mood_clip, tone

sr = 11025
rng = np.random.default_rng(0)
sounds = {
    "tone 1 kHz": tone(1000.0, 1.0, 0.5),
    "white noise": 0.3 * rng.standard_normal(sr),
    "high-passed noise": np.diff(0.3 * rng.standard_normal(sr + 1)),
}
print(f"{'':18s} {'centroid Hz':>11s} {'entropy':>8s} {'flatness':>9s} {'sharpness':>10s}")
for name, x in sounds.items():
    spec = stft(frame_signal(AudioClip(x, sr), "hann"))
    print(f"{name:18s} {spectral.spectral_centroid_hz(spec):11.0f} {spectral.spectral_entropy(spec):8.3f} "
          f"{spectral.spectral_flatness(spec):9.3f} {spectral.sharpness_acum(spec):10.3f}")

###############################################################################
# Frame-level descriptors (energy, MFCCs, pitch, zero crossings and the
# spectral shape measures) are summarized by a handful of functionals.

clip = mood_clip("sing", "indoor", seed=2)
lld = extract_lld(clip)
print(lld.frames.shape, "frame matrix;", len(lld.functional_names), "functionals")
print("mean pitch while singing:", round(lld.functional("f0", "mean"), 1), "Hz")

###############################################################################
# The classifier input concatenates a DCT of the functionals with the
# curated voice-quality scalars. Silent stretches produce flags, not errors.

fv, curated, _ = clip_features(clip)
print(len(fv), "dimensions")
for k, v in curated.to_dict().items():
    print(f"  {k:20s} {v:.4g}" if isinstance(v, float) else f"  {k:20s} {v}")
