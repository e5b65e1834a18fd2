"""
Pitch and voice quality
=======================

Pitch comes from the peak of the normalized autocorrelation inside the
50-500 Hz lag window. Jitter, shimmer and the harmonics-to-noise ratio
are then computed over the voiced frames.
"""

import numpy as np

from audiolog import AudioClip
from audiolog.features import voice
from audiolog.features.pitch import track_pitch
from audiolog.synth import sawtooth
from audiolog.synth import voice as synth_voice

sr = 11025
steady = AudioClip(sawtooth(180.0, 1.0, 0.5), sr)
track = track_pitch(steady)
print(f"voiced frames {track.M}/{len(track)}, median f0 {np.median(track.voiced_f0):.1f} Hz")

###############################################################################
# A steady sawtooth has no jitter and no pitch range. Give a formant voice a
# 5 Hz vibrato of 6 percent and both appear.

t = np.arange(sr) / sr
wobble = 180.0 * (1 + 0.06 * np.sin(2 * np.pi * 5 * t))
shaky = AudioClip(0.5 * synth_voice(wobble, ((600.0, 90.0), (1700.0, 120.0))), sr)

for name, clip in (("steady", steady), ("shaky", shaky)):
    t = track_pitch(clip)
    hnr_mean, _ = voice.hnr_segmental(clip, t)
    print(f"{name:7s} jitter {voice.jitter_rel(t):5.2f} %  shimmer {voice.shimmer_db(clip, t):5.2f} dB  "
          f"range {voice.freq_range(t):6.1f} Hz  HNR {hnr_mean:5.1f} dB")

###############################################################################
# The formulas can also be applied to plain period lists.

print(voice.jitter_rel([0.005, 0.006]), voice.shimmer_from_amplitudes([1.0, 0.1]))
