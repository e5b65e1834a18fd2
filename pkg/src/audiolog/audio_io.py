"""WAV input/output and the clip data model.

Everything downstream assumes mono float samples in [-1, 1] at
:data:`CANONICAL_RATE`; :func:`canonicalize` gets a clip there.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import EmptyClip, MalformedWav, UnsupportedEncoding

CANONICAL_RATE = 11025

# Kaiser beta 8.6 puts the anti-alias stopband near -85 dB.
RESAMPLE_WINDOW = ("kaiser", 8.6)

_PCM = 0x0001
_IEEE_FLOAT = 0x0003
_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate_hz: int
    source_id: str = ""

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64, copy=True).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise ValueError("clip samples must be finite")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    def with_samples(self, samples: np.ndarray) -> AudioClip:
        return AudioClip(samples, self.sample_rate_hz, self.source_id)


def _read_format(path: Path) -> tuple[int, int, int]:
    """Scan RIFF chunks for ``fmt `` and return (format tag, channels, bits)."""
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
            raise MalformedWav(f"{path}: not a RIFF/WAVE file")
        while True:
            chunk = fh.read(8)
            if len(chunk) < 8:
                raise MalformedWav(f"{path}: no fmt chunk")
            cid, size = struct.unpack("<4sI", chunk)
            if cid == b"fmt ":
                body = fh.read(size)
                if len(body) < 16 or size < 16:
                    raise MalformedWav(f"{path}: truncated fmt chunk")
                tag, channels, _, _, _, bits = struct.unpack("<HHIIHH", body[:16])
                if tag == _EXTENSIBLE:
                    if len(body) < 26:
                        raise MalformedWav(f"{path}: truncated extensible fmt chunk")
                    tag = struct.unpack("<H", body[24:26])[0]
                return tag, channels, bits
            fh.seek(size + (size & 1), 1)


def load_wav(path: str | Path) -> AudioClip:
    """Read a PCM or float WAV file as a mono clip scaled to [-1, 1].

    Channels are averaged; the sample rate is kept as stored.
    """
    path = Path(path)
    tag, channels, bits = _read_format(path)
    if tag not in (_PCM, _IEEE_FLOAT):
        raise UnsupportedEncoding(f"{path}: format tag 0x{tag:04x} is not PCM or float")
    if not 1 <= channels <= 2:
        raise UnsupportedEncoding(f"{path}: {channels} channels")
    if tag == _PCM and bits not in (8, 16, 24, 32):
        raise UnsupportedEncoding(f"{path}: {bits}-bit PCM")
    try:
        rate, data = wavfile.read(path)
    except (ValueError, EOFError, struct.error) as exc:
        raise MalformedWav(f"{path}: {exc}") from exc

    if data.dtype == np.uint8:
        x = (data.astype(np.float64) - 128.0) / 128.0
    elif data.dtype == np.int16:
        x = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        # scipy left-justifies 24-bit samples in int32
        x = data.astype(np.float64) / 2147483648.0
    elif data.dtype.kind == "f":
        x = np.clip(data.astype(np.float64), -1.0, 1.0)
    else:
        raise UnsupportedEncoding(f"{path}: sample dtype {data.dtype}")
    if x.ndim == 2:
        x = x.mean(axis=1)
    return AudioClip(x, int(rate), path.name)


def write_wav(clip: AudioClip, path: str | Path) -> None:
    """Write ``clip`` as 16-bit PCM mono at its own sample rate."""
    q = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype(np.int16)
    wavfile.write(Path(path), clip.sample_rate_hz, q)


def canonicalize(clip: AudioClip) -> AudioClip:
    """Resample to 11025 Hz with a polyphase windowed-sinc filter.

    A clip already at the canonical rate is returned unchanged.
    """
    if len(clip) == 0:
        raise EmptyClip(clip.source_id or "clip has no samples")
    if clip.sample_rate_hz == CANONICAL_RATE:
        return clip
    g = gcd(CANONICAL_RATE, clip.sample_rate_hz)
    up, down = CANONICAL_RATE // g, clip.sample_rate_hz // g
    y = resample_poly(clip.samples, up, down, window=RESAMPLE_WINDOW)
    return AudioClip(np.clip(y, -1.0, 1.0), CANONICAL_RATE, clip.source_id)
