"""Batch analysis of short ambient audio logs.

The processing chain removes silence, suppresses background noise, splits
the speech between two speakers, classifies the acoustic environment and
labels each speaker turn with one of five moods. Every stage is usable on
its own:

>>> from audiolog import synth, dsp
>>> clip = synth.mood_clip("sing", "indoor", seed=1)
>>> len(dsp.frame_signal(clip))
297
"""

from .audio_io import CANONICAL_RATE, AudioClip, canonicalize, load_wav, write_wav
from .denoise import DenoiseConfig, csne_db, denoise
from .diarize import DiarizeConfig, SpeakerSegment, diarize
from .dsp import FrameSeries, Spectrogram, frame_signal, stft
from .vad import VadConfig, VadDecision, detect_speech, suppress_silence

__version__ = "0.1.0"

__all__ = [
    "CANONICAL_RATE",
    "AudioClip",
    "DenoiseConfig",
    "DiarizeConfig",
    "FrameSeries",
    "SpeakerSegment",
    "Spectrogram",
    "VadConfig",
    "VadDecision",
    "canonicalize",
    "csne_db",
    "denoise",
    "detect_speech",
    "diarize",
    "frame_signal",
    "load_wav",
    "stft",
    "suppress_silence",
    "write_wav",
]
