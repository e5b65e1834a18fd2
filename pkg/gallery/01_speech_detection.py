"""
Finding speech in a recording
=============================

A second of near-silence followed by a loud tone. The detector tracks a
noise floor as the running minimum of smoothed frame energy and flags
frames that rise well above it.
"""

import numpy as np

from audiolog import AudioClip, detect_speech, frame_signal, suppress_silence
from audiolog.synth import tone

sr = 11025
rng = np.random.default_rng(0)
x = np.concatenate([1e-4 * rng.standard_normal(sr), tone(1000.0, 1.0)])
clip = AudioClip(x, sr)

decision = detect_speech(frame_signal(clip))
print(f"{len(decision)} frames, speech fraction {decision.speech_fraction:.2f}")

###############################################################################
# The first flagged frame starts within a few hops of the one-second mark.

first = int(np.flatnonzero(decision.speech_flags)[0])
print("first speech frame:", first, "starts at", round(first * 110 / sr, 3), "s")

###############################################################################
# Dropping the silent frames leaves roughly the tone alone.

speech = suppress_silence(clip, decision)
print(f"kept {speech.duration_s:.2f} s of {clip.duration_s:.2f} s")
